#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace infctl {

/// A jump of the control at node `time_index`: the state moves from
/// (x_pre, i_pre) to (x_pre - delta_d, min(i_pre, x_pre - delta_d)).
struct JumpEvent {
    std::size_t time_index = 0;
    double x_pre = 0.0;
    double i_pre = 0.0;
    double delta_d = 0.0;
};

/// Discretised trajectory of (X, I, D) on the uniform grid t_k = k dt.
///
/// Node k holds the state after everything that happens at t_k, including a
/// jump recorded with time_index k. `dc[k]` is the continuous control paid
/// over (t_{k-1}, t_k]. The same container carries a (Y, S) path for the
/// running-supremum operators, in which case `x` holds Y and `inf` holds S.
struct SamplePath {
    double dt = 0.0;
    std::vector<double> times;
    std::vector<double> x;
    std::vector<double> inf;
    std::vector<double> dc;
    std::vector<JumpEvent> jumps;
    std::optional<std::size_t> absorbed_at;
    /// Accumulated discount at each node, as written by the simulator.
    std::vector<double> discount_log;
    /// Admissibility bound on post-jump states: x_pre - delta_d >= bound for
    /// an infimum path. Empty means unconstrained.
    std::optional<double> jump_bound;

    [[nodiscard]] std::size_t size() const { return x.size(); }
    /// Last node that counts toward integrals: absorption or the final node.
    [[nodiscard]] std::size_t last_index() const {
        return absorbed_at ? *absorbed_at : x.size() - 1;
    }
    void clear();
};

/// Structural and admissibility checks for an infimum path. Throws PathError.
void validate_path(const SamplePath& path);

/// Returns the (Y, S) = (-X, -I) image of a path and vice versa.
[[nodiscard]] SamplePath reflect_path(const SamplePath& path);

/// Deterministic map (x, i) -> real. Fields of the form
/// scale * exp(x_rate * x + i_rate * i) can be registered as exponential-affine,
/// which gives the jump integrals closed forms.
class ScalarField {
public:
    struct ExpAffine {
        double scale;
        double x_rate;
        double i_rate;
    };

    explicit ScalarField(std::function<double(double, double)> fn);

    static ScalarField constant(double c);
    static ScalarField exp_affine(double scale, double x_rate, double i_rate);

    [[nodiscard]] double operator()(double x, double i) const {
        if (form_) return form_->scale * std::exp(form_->x_rate * x + form_->i_rate * i);
        return fn_(x, i);
    }

    [[nodiscard]] const std::optional<ExpAffine>& exp_affine_form() const { return form_; }
    [[nodiscard]] bool is_zero() const { return form_ && form_->scale == 0.0; }

    /// (x, i) -> f(-x, -i), preserving an exponential-affine registration.
    [[nodiscard]] ScalarField reflected() const;

private:
    ScalarField() = default;
    std::function<double(double, double)> fn_;
    std::optional<ExpAffine> form_;
};

/// Trapezoidal accumulation of the discount rate r along the path.
[[nodiscard]] std::vector<double> discount_stream(const SamplePath& path, const ScalarField& r);

/// The two pieces of a jump's inner integral.
struct JumpSplit {
    double off_diagonal = 0.0;  ///< u in [0, min(gap, delta_d)] at fixed i_pre
    double diagonal = 0.0;      ///< u in [gap, delta_d] along x = i, zero unless delta_d > gap
};

/// Inner integrals of one jump for the field g, gap = x_pre - i_pre.
/// Closed form for exponential-affine g, adaptive Gauss-Kronrod otherwise.
[[nodiscard]] JumpSplit split_jump(const JumpEvent& jump, const ScalarField& g);

/// Integral of g against the control D over [0, last_index]: continuous
/// control weighted at the post-step state, jumps split into the part that
/// only moves x and the part that drags the infimum along the diagonal.
[[nodiscard]] double diamond_integral(const SamplePath& path, const ScalarField& r,
                                      const ScalarField& g);

/// Integral of g against the infimum I: continuous decreases at steps that
/// end on the diagonal, minus the diagonal part of every hockey-stick jump.
[[nodiscard]] double box_integral(const SamplePath& path, const ScalarField& r,
                                  const ScalarField& g);

/// Same operators with an externally supplied discount stream.
[[nodiscard]] double diamond_integral(const SamplePath& path, std::span<const double> discount,
                                      const ScalarField& g);
[[nodiscard]] double box_integral(const SamplePath& path, std::span<const double> discount,
                                  const ScalarField& g);

/// Running-supremum counterparts for a (Y, S) path, computed through the
/// reflection (Y, S) = (-X, -I).
[[nodiscard]] double diamond_integral_sup(const SamplePath& path_sup, const ScalarField& r,
                                          const ScalarField& g);
[[nodiscard]] double box_integral_sup(const SamplePath& path_sup, const ScalarField& r,
                                      const ScalarField& g);

/// Running reward, control reward and infimum reward, each discounted by r.
/// The running term uses the trapezoidal rule and stops at absorption.
[[nodiscard]] double payoff_functional(const SamplePath& path, const ScalarField& r,
                                       const ScalarField& running, const ScalarField& f,
                                       const ScalarField& h);

}  // namespace infctl
