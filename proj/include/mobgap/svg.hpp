#pragma once

#include "mobgap/cluster.hpp"
#include "mobgap/gaps.hpp"

#include <string>

namespace mobgap {

// Line chart of average dispersion against cluster count, with the selected k
// marked. Deterministic bytes for identical inputs; plain SVG 1.1 with text
// elements, no external fonts.
std::string render_elbow_svg(const DispersionCurve& curve, std::size_t selected_k);

// Bar chart of not-low minus low differences for one metric, one bar per
// group. Bars that are not significant at the 5% level carry an asterisk;
// groups without a computable difference are labeled n/a.
std::string render_gap_chart_svg(const GapReport& report, MetricName metric);

} // namespace mobgap
