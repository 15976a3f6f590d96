#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cool/ir.hpp"

namespace cool {

/// Output heads of one predictor unit. Classification heads are stored as
/// decisions; the wire format carries them as 2-way or 3-way score vectors.
struct PredictionHeads {
  bool domain = true;      // program belongs to this DSL's domain
  bool feasible = true;    // state lies on a feasible path
  JumpPath jumps;          // guidance: root-to-subtree walk ending in stop
  double next_stage = 1;   // guidance
  bool sign_positive = true;
  double value = 0;
  bool expression = true;  // head kind: expression (true) or terminal

  friend bool operator==(const PredictionHeads&, const PredictionHeads&) = default;
};

/// Wire sizes of the output heads, in declaration order.
struct HeadSizes {
  std::size_t domain = 2, feasibility = 2, jumps, next_stage = 1, sign = 2, value = 1, expression = 2;
};
HeadSizes head_sizes(std::size_t max_tree_depth = kDefaultMaxTreeDepth);

/// What a candidate transformation pair would look like to the guidance head.
struct CandidateFeatures {
  JumpPath jumps;
  int next_stage = 1;
  double value = 0;  // u0
  bool expression = true;

  bool sign_positive() const { return value > 0; }
};

struct ControlLaw {
  double tolerance = 0.10;
  double penalty = 10;
};

/// |x-y| / max(|x|,|y|,1e-9)
double relative_difference(double x, double y);

/// Passes C's heads when all classification heads agree across the three
/// units and every regression head is pairwise within `tolerance`.
std::optional<PredictionHeads> filter(const std::array<PredictionHeads, 3>& e0, double tolerance = 0.10);

/// Whether the guidance head describes this candidate.
bool guidance_matches(const PredictionHeads& e1, const CandidateFeatures& c, double tolerance = 0.10);

double adjust(double u0, const PredictionHeads& e1, const CandidateFeatures& c, const ControlLaw& law = {});

double clip(double u1, bool aligned, bool alternative_aligned_exists);

/// One flag per loaded DSL: may its predictor adjust this step?
std::vector<bool> arbitrate(const std::vector<bool>& claims);

struct ControlSignals {
  double u0 = 0;
  std::optional<std::array<PredictionHeads, 3>> e0;
  std::optional<PredictionHeads> e1;
  double u1 = 0;
  double u2 = 0;
  bool aligned = false;
};

}  // namespace cool
