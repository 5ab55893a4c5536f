#pragma once

#include <string>
#include <utility>
#include <vector>

namespace paranil {

enum class Verdict { pass, fail, indeterminate };

std::string to_string(Verdict v);

// Result of a theorem checker or structural test. A `pass` report carries
// the numeric witnesses (exponents, subgroup data, invariants) needed to
// replay the verification; key order is insertion order and is part of the
// deterministic rendering.
struct CheckReport {
  Verdict verdict = Verdict::indeterminate;
  long depth_checked = 0;
  std::vector<std::pair<std::string, std::string>> witnesses;

  void add(const std::string& key, const std::string& value) {
    witnesses.emplace_back(key, value);
  }
  // First value recorded under `key`, empty string when absent.
  std::string get(const std::string& key) const;
  bool passed() const { return verdict == Verdict::pass; }

  std::string to_string() const;
};

}  // namespace paranil
