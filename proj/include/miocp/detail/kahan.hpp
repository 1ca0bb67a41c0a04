#pragma once

namespace miocp::detail {

/* Kahan compensated accumulator.  Running integrals of control deviations are
 * sums of many near-cancelling terms; the compensation keeps the bound checks
 * meaningful at tolerances near machine precision. */
class KahanSum {
public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace miocp::detail
