#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppm/config.hpp"

namespace ppm::harness {

/// A module error tagged with the pipeline stage that raised it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

std::string version();

/// Derived constants of the configured model, with their defining formulas.
void describe_text(const ExperimentConfig& cfg, std::ostream& os);
std::string describe_json(const ExperimentConfig& cfg, int indent = 2);

struct ReplicaReport {
  int index = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::filesystem::path dir;
  std::uint64_t events = 0;
  double end_time = 0.0;
  bool absorbed = false;
  std::vector<std::string> skipped;  ///< analyses left out for lack of data
};

struct RunReport {
  std::filesystem::path dir;
  std::vector<ReplicaReport> replicas;
  double wall_seconds = 0.0;
};

/// Full pipeline: simulate, price and analyse in one streaming pass per
/// replica, then write manifest.json (and summary.tsv for several replicas).
/// Replicas run concurrently, one worker each, in replica_<k> directories;
/// a single replica writes straight into the output directory.
/// The config is validated before anything is created on disk.
RunReport run(const ExperimentConfig& cfg);

/// Stage entry points for the CLI. `simulate` always keeps the event log so
/// that `price` and `analyze` can pick the run up from its directory.
RunReport simulate(const ExperimentConfig& cfg);
/// Reads trajectory.tsv and the manifest from `dir`; writes price files.
void price(const std::filesystem::path& dir);
/// Reads price files (and trajectory.tsv for the recurrence map) from `dir`.
void analyze(const std::filesystem::path& dir);

/// Config echoed in dir/manifest.json.
ExperimentConfig read_manifest_config(const std::filesystem::path& dir);

}  // namespace ppm::harness
