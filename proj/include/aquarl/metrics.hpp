#pragma once

#include <span>
#include <string>

namespace aquarl {

// Feed conversion ratio: total feed over weight gain. Rejects
// final_weight <= initial_weight.
double fcr(double total_feed, double final_weight, double initial_weight);

// Mean absolute percentage error, in percent. The denominator is the
// achieved weight w(i), following the source definition.
double mape(std::span<const double> achieved, std::span<const double> desired);

double mae(std::span<const double> achieved, std::span<const double> desired);
double rmse(std::span<const double> achieved, std::span<const double> desired);

// One evaluated run, serializable as a CSV row (Table-5 column order).
struct EvalReport {
    double mape = 0.0;         // percent
    double mae = 0.0;          // grams
    double rmse = 0.0;         // grams
    double total_feed = 0.0;   // grams
    double final_weight = 0.0; // grams
    double fcr = 0.0;
    int episodes_to_converge = 0;
    bool converged = true;
};

std::string eval_report_csv_header();
std::string eval_report_csv_row(const EvalReport& report);

} // namespace aquarl
