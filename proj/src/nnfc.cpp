#include "cool/nnfc.hpp"

#include <algorithm>
#include <cmath>

namespace cool {

HeadSizes head_sizes(std::size_t max_tree_depth) {
  HeadSizes s;
  s.jumps = max_tree_depth * 3;
  return s;
}

double relative_difference(double x, double y) {
  double scale = std::max({std::fabs(x), std::fabs(y), 1e-9});
  return std::fabs(x - y) / scale;
}

std::optional<PredictionHeads> filter(const std::array<PredictionHeads, 3>& e0, double tolerance) {
  const auto& a = e0[0];
  for (const auto& o : {e0[1], e0[2]}) {
    if (o.domain != a.domain || o.feasible != a.feasible || o.jumps != a.jumps ||
        o.sign_positive != a.sign_positive || o.expression != a.expression)
      return std::nullopt;
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (relative_difference(e0[i].next_stage, e0[j].next_stage) > tolerance) return std::nullopt;
      if (relative_difference(e0[i].value, e0[j].value) > tolerance) return std::nullopt;
    }
  }
  return e0[2];
}

bool guidance_matches(const PredictionHeads& e1, const CandidateFeatures& c, double tolerance) {
  return e1.jumps == c.jumps && std::lround(e1.next_stage) == c.next_stage &&
         e1.sign_positive == c.sign_positive() && e1.expression == c.expression &&
         relative_difference(e1.value, c.value) <= tolerance;
}

double adjust(double u0, const PredictionHeads& e1, const CandidateFeatures& c, const ControlLaw& law) {
  double penalized = u0 - std::fabs(u0) - law.penalty;
  if (!e1.domain || !e1.feasible) return penalized;
  if (guidance_matches(e1, c, law.tolerance)) return u0 + std::fabs(u0);
  return penalized;
}

double clip(double u1, bool aligned, bool alternative_aligned_exists) {
  return (u1 > 0 && !aligned && alternative_aligned_exists) ? 0.0 : u1;
}

std::vector<bool> arbitrate(const std::vector<bool>& claims) {
  bool any = std::any_of(claims.begin(), claims.end(), [](bool b) { return b; });
  if (!any) return std::vector<bool>(claims.size(), true);
  return claims;
}

}  // namespace cool
