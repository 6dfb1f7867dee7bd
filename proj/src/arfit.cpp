#include "fceval/arfit.hpp"

#include <Eigen/Dense>

#include "fceval/error.hpp"

namespace fceval::arfit {

ArModel fit(const core::EmbeddedMatrix& m, const std::vector<std::size_t>& rows, bool intercept) {
    const std::size_t p = m.order();
    std::vector<std::size_t> use = rows;
    if (use.empty())
        for (std::size_t i = 0; i < m.rows(); ++i) use.push_back(i);
    const std::size_t cols = p + (intercept ? 1 : 0);
    if (use.size() < cols) {
        throw InsufficientDataError("AR(" + std::to_string(p) + ") fit needs at least " + std::to_string(cols) +
                                    " rows, got " + std::to_string(use.size()));
    }
    Eigen::MatrixXd X(static_cast<Eigen::Index>(use.size()), static_cast<Eigen::Index>(cols));
    Eigen::VectorXd y(static_cast<Eigen::Index>(use.size()));
    for (std::size_t r = 0; r < use.size(); ++r) {
        const auto lags = m.predictors(use[r]);
        const auto ri = static_cast<Eigen::Index>(r);
        // Column i holds y_{t-1-i}: lag 1 is the newest predictor.
        for (std::size_t i = 0; i < p; ++i) X(ri, static_cast<Eigen::Index>(i)) = lags[p - 1 - i];
        if (intercept) X(ri, static_cast<Eigen::Index>(p)) = 1.0;
        y(ri) = m.target(use[r]);
    }
    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    ArModel model;
    model.phi.resize(p);
    for (std::size_t i = 0; i < p; ++i) model.phi[i] = beta(static_cast<Eigen::Index>(i));
    if (intercept) model.intercept = beta(static_cast<Eigen::Index>(p));
    return model;
}

ArModel fit(std::span<const double> y, std::size_t order, bool intercept) {
    const auto series = core::TimeSeries::from_values("fit", std::vector<double>(y.begin(), y.end()));
    return fit(core::embed(series, order), {}, intercept);
}

double predict(const ArModel& model, std::span<const double> lags) {
    const std::size_t p = model.phi.size();
    if (lags.size() < p) throw DomainError("AR prediction needs " + std::to_string(p) + " lags");
    double v = model.intercept;
    for (std::size_t i = 0; i < p; ++i) v += model.phi[i] * lags[lags.size() - 1 - i];
    return v;
}

std::vector<double> forecast(const ArModel& model, std::span<const double> history, std::size_t h) {
    const std::size_t p = model.phi.size();
    if (history.size() < p) throw InsufficientDataError("AR forecast needs at least p observations");
    std::vector<double> buf(history.end() - static_cast<std::ptrdiff_t>(p), history.end());
    std::vector<double> out;
    out.reserve(h);
    for (std::size_t k = 0; k < h; ++k) {
        const double v = predict(model, buf);
        out.push_back(v);
        buf.push_back(v);
    }
    return out;
}

}  // namespace fceval::arfit
