#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace csf {

/// Periodic tridiagonal system
///
///   lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]   (indices mod n)
///
/// solved with the Thomas algorithm plus a Sherman-Morrison correction for
/// the two corner entries. The factorization is reused across right-hand
/// sides. Requires n >= 3 and a diagonally dominant matrix.
class CyclicTridiagonal {
public:
    CyclicTridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper)
        : lower_(std::move(lower)), diag_(std::move(diag)), upper_(std::move(upper)) {
        const std::size_t n = diag_.size();
        alpha_ = lower_[0];      // couples row 0 to x[n-1]
        beta_ = upper_[n - 1];   // couples row n-1 to x[0]
        gamma_ = -diag_[0];
        mod_diag_ = diag_;
        mod_diag_[0] = diag_[0] - gamma_;
        mod_diag_[n - 1] = diag_[n - 1] - alpha_ * beta_ / gamma_;

        cprime_.resize(n);
        denom_.resize(n);
        denom_[0] = mod_diag_[0];
        cprime_[0] = upper_[0] / denom_[0];
        for (std::size_t i = 1; i < n; ++i) {
            denom_[i] = mod_diag_[i] - lower_[i] * cprime_[i - 1];
            cprime_[i] = upper_[i] / denom_[i];
        }

        std::vector<double> u(n, 0.0);
        u[0] = gamma_;
        u[n - 1] = beta_;
        correction_.resize(n);
        thomas(u, correction_);
        corr_scale_ = 1.0 + correction_[0] + alpha_ * correction_[n - 1] / gamma_;
    }

    std::size_t size() const noexcept { return diag_.size(); }

    void solve(std::span<const double> rhs, std::span<double> x) const {
        const std::size_t n = size();
        thomas(rhs, x);
        const double fact = (x[0] + alpha_ * x[n - 1] / gamma_) / corr_scale_;
        for (std::size_t i = 0; i < n; ++i) x[i] -= fact * correction_[i];
    }

private:
    void thomas(std::span<const double> rhs, std::span<double> x) const {
        const std::size_t n = size();
        x[0] = rhs[0] / denom_[0];
        for (std::size_t i = 1; i < n; ++i) x[i] = (rhs[i] - lower_[i] * x[i - 1]) / denom_[i];
        for (std::size_t i = n - 1; i-- > 0;) x[i] -= cprime_[i] * x[i + 1];
    }

    std::vector<double> lower_, diag_, upper_;
    std::vector<double> mod_diag_, cprime_, denom_, correction_;
    double alpha_ = 0.0, beta_ = 0.0, gamma_ = 0.0, corr_scale_ = 1.0;
};

} // namespace csf
