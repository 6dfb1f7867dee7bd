#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fceval/core.hpp"

namespace fceval::arfit {

/// Least-squares autoregression y_t = c + sum_i phi_i y_{t-i}.
struct ArModel {
    std::vector<double> phi;  // phi_1..phi_p
    double intercept = 0.0;
};

/// Fits on the embedded rows listed in `rows` (all rows when empty).
ArModel fit(const core::EmbeddedMatrix& m, const std::vector<std::size_t>& rows = {}, bool intercept = true);
ArModel fit(std::span<const double> y, std::size_t order, bool intercept = true);

/// One-step prediction from lags given oldest first.
double predict(const ArModel& model, std::span<const double> lags_oldest_first);

/// Iterated h-step forecasts after the end of `history`.
std::vector<double> forecast(const ArModel& model, std::span<const double> history, std::size_t h);

}  // namespace fceval::arfit
