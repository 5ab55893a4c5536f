// Named presentations shared across the test suites.
#pragma once

#include "paranil/pcgroup.hpp"

namespace fixtures {

using namespace paranil;

// Heisenberg group: a, b, c all infinite, c central, b^a = b*c.
inline PcPresentationPtr heisenberg() {
  PcPresentation p({"a", "b", "c"}, {0, 0, 0});
  p.set_conjugate(0, 1, {0, 1, 1});           // b^a = b c
  p.set_conjugate_inverse(0, 1, {0, 1, -1});  // b^(a^-1) = b c^-1
  return finish_presentation(std::move(p));
}

// Same presentation but with the inverse conjugation left for build() to
// derive (the action of a is unipotent).
inline PcPresentationPtr heisenberg_derived_inverse() {
  PcPresentation p({"a", "b", "c"}, {0, 0, 0});
  p.set_conjugate(0, 1, {0, 1, 1});
  return finish_presentation(std::move(p));
}

// S3 as <g1, g2 | g1^2, g2^3, g2^g1 = g2^2>.
inline PcPresentationPtr sym3() {
  PcPresentation p({"g1", "g2"}, {2, 3});
  p.set_conjugate(0, 1, {0, 2});
  return finish_presentation(std::move(p));
}

// C6 as orders (2,3) with trivial action.
inline PcPresentationPtr c6() {
  PcPresentation p({"g1", "g2"}, {2, 3});
  return finish_presentation(std::move(p));
}

// C4 as orders (2,2) with g1^2 = g2.
inline PcPresentationPtr c4() {
  PcPresentation p({"g1", "g2"}, {2, 2});
  p.set_power(0, {0, 1});
  return finish_presentation(std::move(p));
}

// Free abelian of rank n.
inline PcPresentationPtr free_abelian(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; i++) names.push_back("x" + std::to_string(i + 1));
  PcPresentation p(names, std::vector<Integer>(n, Integer(0)));
  return finish_presentation(std::move(p));
}

// The inconsistent orders-(2,5) presentation with g2^g1 = g2^2.
inline PcPresentation bad25() {
  PcPresentation p({"g1", "g2"}, {2, 5});
  p.set_conjugate(0, 1, {0, 2});
  p.build();
  return p;
}

// The paper's p = 3 companion instance H = Z^2 x| Z: generators (t, x1, x2),
// x1^t = x2, x2^t = x1^-1 x2^-1.
inline PcPresentationPtr p3_instance() {
  PcPresentation p({"t", "x1", "x2"}, {0, 0, 0});
  p.set_conjugate(0, 1, {0, 0, 1});            // x1^t = x2
  p.set_conjugate(0, 2, {0, -1, -1});          // x2^t = x1^-1 x2^-1
  p.set_conjugate_inverse(0, 1, {0, -1, -1});  // x1^(t^-1) = x1^-1 x2^-1
  p.set_conjugate_inverse(0, 2, {0, 1, 0});    // x2^(t^-1) = x1
  return finish_presentation(std::move(p));
}

}  // namespace fixtures
