#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <vector>

#include "selfsim/detection.hpp"
#include "selfsim/fractal.hpp"
#include "selfsim/gate.hpp"
#include "selfsim/rng.hpp"

namespace selfsim {

/// Accuracy-milestone latch: the self-similar loss switches on once every
/// self-similar class reaches ap_m AP50, and stays on.
struct MilestoneState {
  double ap_m = 0.25;
  std::vector<ClassId> self_similar;
  std::map<ClassId, double> per_class_ap;
  bool active = false;
};

/// Throws ContractViolation if a self-similar class is missing from
/// per_class_ap or no class is marked self-similar.
MilestoneState milestone_update(MilestoneState state, const std::map<ClassId, double>& per_class_ap);

/// Output-quality knobs of the stub detector. Jitter decays linearly from
/// jitter_start (first epoch) to jitter_end (last epoch).
struct NoiseSchedule {
  double jitter_start = 0.5;
  double jitter_end = 0.05;
  double fractal_prob = 0.3;  // per GT: emit a fractal sub-box instead of the whole
  double miss_prob = 0.1;     // per GT (when not fractal): emit nothing
  double fp_rate = 0.2;       // per GT: add one background false positive

  double jitter_at(int epoch, int epochs) const noexcept;
};

struct SimConfig {
  std::uint64_t seed = 1;
  int epochs = 20;
  double ap_m = 0.25;
  std::vector<Category> categories;
  std::vector<SceneSpec> scenes;
  NoiseSchedule schedule;
  GateConfig gate;
  unsigned threads = 0;

  /// Throws ContractViolation on epochs < 1, probabilities outside [0, 1],
  /// duplicate image ids, or objects with undeclared classes.
  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double ap50_all = 0.0;
  std::map<ClassId, double> ap50;
  double apss_all = 0.0;
  std::map<ClassId, double> apss;
  bool gate_active = false;  // latch state after this epoch's milestone update
  std::size_t pairs_tested = 0;
  std::size_t pairs_gated = 0;
  double mean_gated_loss = 0.0;
  double mean_ungated_loss = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

/// Per GT: with fractal_prob a (lightly jittered) fractal-region box, else
/// with miss_prob nothing, else a jittered whole box; plus background false
/// positives at fp_rate.
std::vector<Detection> stub_detect(const SyntheticScene& scene, int epoch, const SimConfig& cfg,
                                   Rng& rng);

/// Seed of the detector RNG for one (epoch, scene) cell.
std::uint64_t stub_seed(std::uint64_t seed, int epoch, std::size_t scene_index) noexcept;

std::vector<EpochRecord> run_simulation(const SimConfig& cfg);

/// Columns: epoch, ap50_all, ap50_<class>..., apss_all, apss_<class>...,
/// gate_active, pairs_tested, pairs_gated, mean_gated_loss, mean_ungated_loss.
void write_epoch_csv(std::ostream& out, const std::vector<EpochRecord>& records,
                     const std::vector<Category>& categories);

}  // namespace selfsim
