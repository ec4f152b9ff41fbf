#ifndef SHARPMTG_MARTINGALE_HPP
#define SHARPMTG_MARTINGALE_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sharpmtg::mc {

using Vec2 = std::array<double, 2>;

/// Rows x, y, u, v of the increment matrix for one step:
/// dX = h.dB, dY = h2.dB, dU = k.dB, dV = k2.dB.
struct IncrementFrame {
  Vec2 h{};
  Vec2 h2{};
  Vec2 k{};
  Vec2 k2{};
};

struct MartingaleState {
  double X = 0.0, Y = 0.0, U = 0.0, V = 0.0;
};

/// Which constraints a strategy promises. The c_p bound needs all three
/// with factor 1; the A*Z transform of a general Z only gives W-orthogonality
/// and factor 4.
struct FrameConstraints {
  bool z_orthogonal = true;
  bool w_orthogonal = true;
  double subordination_factor = 1.0;
};

/// Thrown when a strategy emits a frame outside its declared constraint set.
class ConstraintViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Empty string when the frame satisfies the constraints to `tol` (relative to
/// the frame's squared size), otherwise a description of the first failure.
std::string frame_violation(const IncrementFrame& f, const FrameConstraints& c, double tol = 1e-12);

struct StepContext {
  int step = 0;
  int n_steps = 0;
  double t = 0.0;
  double dt = 0.0;
  MartingaleState state;
};

struct MartingaleStrategy {
  std::string name;
  FrameConstraints constraints;
  MartingaleState initial;
  /// Non-anticipatory: sees only the state reached so far.
  std::function<IncrementFrame(const StepContext&)> rule;
  /// Whether the strategy meets the hypotheses of the c_p bound.
  bool in_bound_set = true;
};

// Building blocks.

using AngleRule = std::function<double(const StepContext&)>;

/// h = r(cos t, sin t), h2 = r(-sin t, cos t) (or r(sin t, -cos t) when
/// reflect), k = b r(cos q, sin q), k2 = b r(-sin q, cos q).
MartingaleStrategy rotation_strategy(std::string name, AngleRule theta, AngleRule psi, AngleRule b, bool reflect,
                                     MartingaleState initial, double r = 1.0);

/// W = A*Z (times `scale`): u1 = -x1 - y2, v1 = x2 - y1, u2 = x2 - y1, v2 = x1 + y2.
/// The Z rows come from z_rule (its k, k2 are ignored).
MartingaleStrategy ab_transform_strategy(std::string name, std::function<IncrementFrame(const StepContext&)> z_rule,
                                         bool z_orthogonal, double scale, MartingaleState initial);

/// Applies A*Z to a pair of rows.
void ab_rows(const Vec2& x, const Vec2& y, Vec2& u, Vec2& v);

/// Shipped strategies. greedy depends on p through c_p; the others ignore it.
std::vector<std::string> strategy_names();
std::vector<std::string> bound_set_names();
bool is_strategy_name(const std::string& name);
MartingaleStrategy make_strategy(const std::string& name, double p);

/// Smallest sample for which a ratio is reported.
inline constexpr int kMinPaths = 1000;

struct McOptions {
  int n_paths = 100000;
  int n_steps = 256;
  double t_final = 1.0;
  std::uint64_t seed = 1;
  /// Gaussian draws per step; the increment of a step is their sum. A run with
  /// (n_steps / 2, refine 2) sees the same Brownian path as (n_steps, 1).
  int refine = 1;
  /// 0 means SHARP_MTG_THREADS or hardware concurrency.
  int threads = 0;
  int batches = 50;
  double kurtosis_warn = 50.0;
};

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
};

struct PathEstimate {
  std::string strategy;
  double p = 0.0;
  int n_paths = 0;
  int n_steps = 0;
  double t_final = 0.0;
  std::uint64_t seed = 0;
  double est_Zp = 0.0;
  double est_Wp = 0.0;
  double se_Zp = 0.0;
  double se_Wp = 0.0;
  double ratio = 0.0;
  double se = 0.0;  // of the ratio, delta method over batch means
  bool heavy_tail_warning = false;
  double kurtosis_proxy = 0.0;

  // Diagnostics.
  MeanEstimate X, Y, U, V;   // terminal values
  MeanEstimate realized_uv;  // sum of dU dV
  MeanEstimate realized_xy;  // sum of dX dY
  /// max over paths of sum(|k|^2 + |k2|^2) dt / sum(|h|^2 + |h2|^2) dt; NaN if Z never moved.
  double max_qv_ratio = 0.0;
};

PathEstimate run_mc(const MartingaleStrategy& s, double p, const McOptions& opt);

/// One simulation, moments for every p in p_list (strategy must not depend on p).
std::vector<PathEstimate> run_mc_multi(const MartingaleStrategy& s, std::span<const double> p_list,
                                       const McOptions& opt);

int resolve_threads(int requested);

void write_csv_header(std::ostream& out);
void write_csv_row(const PathEstimate& e, std::ostream& out);

}  // namespace sharpmtg::mc

#endif
