#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "scram_xai/csv.hpp"
#include "scram_xai/errors.hpp"
#include "scram_xai/reactor_sim.hpp"
#include "scram_xai/series.hpp"

namespace scram_xai {

// splitmix64 finalizer; turns (campaign seed, index) into independent seeds.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// A family of randomized operating histories.
struct CorpusSpec {
  std::size_t cycles = 47;
  std::size_t scrams = 24;
  std::uint64_t seed = 1;

  std::size_t cycle_duration = 5700;
  double cycle_power_min = 50.0;
  double cycle_power_max = 100.0;
  double cycle_null_rate = 0.0005;
  double cycle_outlier_rate = 0.0;

  std::size_t scram_duration = 800;
  std::size_t scram_onset_min = 270;
  std::size_t scram_onset_max = 330;
  double scram_power_min = 85.0;
  double scram_power_max = 95.0;
  double scram_null_rate = 0.0;

  NoiseAmplitudes noise = kDefaultNoise;

  void validate() const {
    if (cycle_duration < 600) throw ValidationError("cycle_duration must be >= 600 s");
    if (!(cycle_power_min > 0.0 && cycle_power_min <= cycle_power_max &&
          cycle_power_max <= 100.0)) {
      throw ValidationError("cycle power range must satisfy 0 < min <= max <= 100");
    }
    if (scram_onset_min == 0 || scram_onset_min > scram_onset_max ||
        scram_onset_max >= scram_duration) {
      throw ValidationError("scram onset range must satisfy 0 < min <= max < duration");
    }
    if (!(scram_power_min >= 0.0 && scram_power_min <= scram_power_max &&
          scram_power_max <= 100.0)) {
      throw ValidationError("scram power range must satisfy 0 <= min <= max <= 100");
    }
  }
};

// Cycle k: start-up, one to three power levels, shutdown about 900 s
// before the end of the record.
inline CycleProfile cycle_profile(const CorpusSpec& spec, std::size_t k) {
  std::mt19937_64 rng(mix_seed(spec.seed, 2 * k));
  std::uniform_real_distribution<double> level(spec.cycle_power_min, spec.cycle_power_max);
  std::uniform_int_distribution<std::size_t> holds(1, 3);

  CycleProfile p;
  p.duration = spec.cycle_duration;
  p.noise = spec.noise;
  p.null_rate = spec.cycle_null_rate;
  p.outlier_rate = spec.cycle_outlier_rate;
  p.seed = rng();
  const std::size_t shutdown = spec.cycle_duration - spec.cycle_duration * 3 / 19;
  const std::size_t n = holds(rng);
  p.setpoints.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t start = 60 + i * (shutdown - 60) / n;
    p.setpoints.push_back({start, level(rng)});
  }
  p.setpoints.push_back({shutdown, 0.0});
  return p;
}

inline ScramProfile scram_profile(const CorpusSpec& spec, std::size_t k) {
  std::mt19937_64 rng(mix_seed(spec.seed, 2 * k + 1));
  std::uniform_int_distribution<std::size_t> onset(spec.scram_onset_min, spec.scram_onset_max);
  std::uniform_real_distribution<double> power(spec.scram_power_min, spec.scram_power_max);
  ScramProfile p;
  p.duration = spec.scram_duration;
  p.noise = spec.noise;
  p.seed = rng();
  p.onset = onset(rng);
  p.initial_power = power(rng);
  return p;
}

inline MultivariateSeries make_scram(const CorpusSpec& spec, const ScramProfile& p) {
  auto s = generate_scram(p);
  if (spec.scram_null_rate > 0.0) {
    s = add_artifacts(std::move(s), 0.0, spec.scram_null_rate, p.seed ^ 0x2545f4914f6cdd1dULL,
                      p.scale.max_travel);
  }
  return s;
}

struct ManifestEntry {
  std::string kind;  // "cycle" or "scram"
  std::string file;  // relative to the manifest's directory
  std::uint64_t seed = 0;
  std::size_t onset = 0;  // SCRAM onset second; 0 for cycles

  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  std::vector<ManifestEntry> of_kind(const std::string& kind) const {
    std::vector<ManifestEntry> out;
    for (const auto& e : entries) {
      if (e.kind == kind) out.push_back(e);
    }
    return out;
  }
};

inline std::string manifest_to_csv(const Manifest& m) {
  std::string out = "kind,file,seed,onset\n";
  for (const auto& e : m.entries) {
    out += e.kind + ',' + e.file + ',' + std::to_string(e.seed) + ',' + std::to_string(e.onset) +
           '\n';
  }
  return out;
}

inline Manifest read_manifest(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty() || csv::trim(lines[0]) != "kind,file,seed,onset") {
    throw IngestionError(path + ": expected header kind,file,seed,onset");
  }
  Manifest m;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto cells = csv::split(lines[row]);
    if (cells.size() != 4) throw IngestionError(path + ": malformed row " + std::to_string(row));
    ManifestEntry e;
    e.kind = std::string(csv::trim(cells[0]));
    if (e.kind != "cycle" && e.kind != "scram") {
      throw IngestionError(path + ": unknown kind '" + e.kind + "'");
    }
    e.file = std::string(csv::trim(cells[1]));
    try {
      e.seed = std::stoull(std::string(csv::trim(cells[2])));
      e.onset = std::stoull(std::string(csv::trim(cells[3])));
    } catch (const std::exception&) {
      throw IngestionError(path + ": bad seed or onset in row " + std::to_string(row));
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

}  // namespace scram_xai
