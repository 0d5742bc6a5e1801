#pragma once

#include <string>
#include <vector>

namespace covshift::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
    bool markers = false;
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    int width = 640;
    int height = 460;
    std::vector<Series> series;
};

/// Static line chart: polylines, optional point markers, axis ticks and a
/// legend. On log axes non-positive values are dropped.
std::string render(const Plot& plot);

}  // namespace covshift::svg
