#pragma once

// Flat `section.key = value` run configuration.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sbp/optimizer.hpp"
#include "sbp/problem.hpp"

namespace sbp {

enum class RunMode { ground, excited, verify, refine, oracle };
std::string to_string(RunMode m);

struct RunConfig {
  std::string source;  ///< path of the config file, "" for in-memory text
  int dim = 1;
  std::vector<double> lengths{1.0};
  std::vector<int> n{129};
  double kappa = 1.0;
  double p = 3.0;
  CouplingSpec coupling = AffineCoupling{};
  /// Per face (xmin, xmax, ymin, ...): a constant or a tabulated file.
  struct FaceValue {
    double constant = 0.0;
    std::string file;
  };
  std::map<std::string, FaceValue> h1, h2;
  LinearSolveOptions solver = reduction_solver_defaults();
  OptimizeOptions optimizer;
  RunMode mode = RunMode::ground;
  int k = 1;
  std::uint64_t seed = 0;
  int sphere_samples = 4;
  std::vector<int> refine_n{65, 129, 257};
  std::size_t oracle_max_nodes = 5000;
  std::string output_dir = "out";
  bool dump_fields = true;

  GridSpec grid() const;
  GridSpec grid(int nodes) const;  ///< same domain, `nodes` on every axis
  BoundaryData boundary(const GridSpec& grid, int which) const;  ///< which = 1, 2
  /// Problem on the configured grid (or on `grid` when given).
  Problem problem() const;
  Problem problem(const GridSpec& grid) const;
};

/// Throws ConfigError naming the offending key.
RunConfig parse_config(const std::string& text, const std::string& source = "");
RunConfig load_config(const std::string& path);

/// Face names in face-id order: xmin, xmax, ymin, ymax, zmin, zmax.
const std::vector<std::string>& face_names();

}  // namespace sbp
