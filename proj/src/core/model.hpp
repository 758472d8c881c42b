#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace coalflow {

enum class DriftKind { zero, linear, cosine, scaled_tanh };

// A drift is a named, parameterized built-in together with a valid Lipschitz
// constant, so configurations serialize and a manifest reproduces a run
// exactly.  Arbitrary callables are a library-level extension, not a config
// one.
class DriftModel {
 public:
  static DriftModel zero();
  static DriftModel linear(double c);
  static DriftModel cosine();
  static DriftModel scaled_tanh(double scale);
  // kind in {"zero", "linear", "cosine", "scaled-tanh"}; linear and
  // scaled-tanh take one parameter.  Throws std::invalid_argument.
  static DriftModel from_name(const std::string& kind,
                              const std::vector<double>& params);

  double eval(double u) const;
  double operator()(double u) const { return eval(u); }
  double lipschitz() const { return lipschitz_; }
  DriftKind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  std::string name() const;
  bool is_zero() const { return kind_ == DriftKind::zero; }

 private:
  DriftModel(DriftKind kind, std::vector<double> params, double lipschitz)
      : kind_(kind), params_(std::move(params)), lipschitz_(lipschitz) {}

  DriftKind kind_;
  std::vector<double> params_;
  double lipschitz_;
};

inline double drift_eval(const DriftModel& model, double u) {
  return model.eval(u);
}

// Partition of [0, 1]; mesh is the exact max gap in binary-rounded
// arithmetic.
struct Partition {
  std::vector<double> breakpoints;
  double mesh = 0.0;

  static Partition uniform(int n);
  static Partition from_breakpoints(std::vector<double> points);

  int intervals() const { return static_cast<int>(breakpoints.size()) - 1; }
};

inline Partition make_uniform_partition(int n) { return Partition::uniform(n); }

// Everything needed to reproduce a run's outputs bit-exactly, plus wall
// times for the record.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::map<std::string, std::string> params;
  std::uint64_t master_seed = 0;
  std::string artifact_version;
  std::string started_utc;
  std::string finished_utc;
};

}  // namespace coalflow
