#include "aquarl/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "aquarl/csv.hpp"

namespace aquarl {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void check_pair(std::span<const double> achieved, std::span<const double> desired) {
    require(!achieved.empty(), "metrics: empty series");
    require(achieved.size() == desired.size(), "metrics: length mismatch");
}

} // namespace

double fcr(double total_feed, double final_weight, double initial_weight) {
    require(final_weight > initial_weight,
            "fcr: final weight must exceed the initial weight");
    return total_feed / (final_weight - initial_weight);
}

double mape(std::span<const double> achieved, std::span<const double> desired) {
    check_pair(achieved, desired);
    double sum = 0.0;
    for (std::size_t i = 0; i < achieved.size(); ++i) {
        require(achieved[i] > 0.0, "mape: achieved weights must be positive");
        sum += std::abs(achieved[i] - desired[i]) / achieved[i];
    }
    return 100.0 * sum / static_cast<double>(achieved.size());
}

double mae(std::span<const double> achieved, std::span<const double> desired) {
    check_pair(achieved, desired);
    double sum = 0.0;
    for (std::size_t i = 0; i < achieved.size(); ++i)
        sum += std::abs(achieved[i] - desired[i]);
    return sum / static_cast<double>(achieved.size());
}

double rmse(std::span<const double> achieved, std::span<const double> desired) {
    check_pair(achieved, desired);
    double sum = 0.0;
    for (std::size_t i = 0; i < achieved.size(); ++i) {
        const double d = achieved[i] - desired[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(achieved.size()));
}

std::string eval_report_csv_header() {
    return "mape_pct,mae_g,rmse_g,total_feed_g,final_weight_g,fcr,episodes,"
           "converged";
}

std::string eval_report_csv_row(const EvalReport& r) {
    return csv_join({format_number(r.mape), format_number(r.mae),
                     format_number(r.rmse), format_number(r.total_feed),
                     format_number(r.final_weight), format_number(r.fcr),
                     std::to_string(r.episodes_to_converge),
                     r.converged ? "1" : "0"});
}

} // namespace aquarl
