#pragma once

#include <string>
#include <vector>

namespace aqr {

struct Curve {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Nominal level against empirical coverage, with the diagonal.
std::string reliability_svg(const std::vector<Curve>& curves, const std::string& title);

/// Grouped bars of mean interval width per central coverage.
std::string sharpness_svg(const std::vector<Curve>& curves, const std::string& title);

/// Central prediction band and observations over consecutive forecasts.
struct FanChartData {
    std::vector<double> observed;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> median;
};

std::string fan_chart_svg(const FanChartData& data, const std::string& title);

}  // namespace aqr
