#pragma once

#include <functional>
#include <vector>

namespace vflow {

using State = std::vector<double>;
using RhsFn = std::function<void(double t, const State& y, State& dydt)>;

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 0.0; // 0 = choose automatically
    double max_step = 0.0;     // 0 = no cap
};

/** One accepted step, carrying the order-4 interpolant so the trajectory can
 *  be evaluated anywhere inside [t0, t0+h] after the fact. */
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    std::vector<double> r1, r2, r3, r4, r5;

    double t1() const { return t0 + h; }
    void eval(double t, State& y) const;
    double eval_component(double t, std::size_t i) const;
};

struct OdeStats {
    long accepted = 0;
    long rejected = 0;
};

/** Explicit Dormand-Prince 5(4) pair with PI step-size control and the
 *  classic continuous extension.  Deterministic: no threading, no
 *  reordering, the same inputs always produce the same trajectory. */
class Dopri5 {
public:
    Dopri5(RhsFn rhs, OdeOptions opt);

    /** Integrate from (t0, y0) toward t_end.  `on_step` runs after every
     *  accepted step; returning false halts integration early.  Throws
     *  StepUnderflow when the controller pushes the step below 1e-12. */
    OdeStats integrate(double t0, State y0, double t_end,
                       const std::function<bool(const DenseStep&)>& on_step);

private:
    RhsFn rhs_;
    OdeOptions opt_;
};

} // namespace vflow
