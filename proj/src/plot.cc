// Copyright 2026 The qtree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qtree/plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "qtree/errors.h"

namespace qtree {

namespace {

const char *kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    return buf;
}

std::string join(const std::vector<double> &xs) {
    std::string s;
    for (size_t i = 0; i < xs.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", xs[i]);
        s += (i ? ", " : "") + std::string(buf);
    }
    return s;
}

std::string color_for(int t, const std::vector<int> &ts) {
    const auto it = std::find(ts.begin(), ts.end(), t);
    const size_t i = it == ts.end() ? 0 : static_cast<size_t>(it - ts.begin());
    return kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
}

}  // namespace

std::string emit_plot(const std::vector<CurvePoint> &curves, const std::vector<EstimatorResult> &estimates,
                      const PlotOptions &options) {
    std::map<int, std::vector<std::pair<double, double>>> series;
    for (const auto &p : curves) {
        series[p.t].emplace_back(p.theta, p.z_mean);
    }
    for (auto &[t, pts] : series) {
        std::sort(pts.begin(), pts.end());
    }

    // All depths must share one theta grid.
    if (!series.empty()) {
        const auto &ref = series.begin()->second;
        for (const auto &[t, pts] : series) {
            bool same = pts.size() == ref.size();
            for (size_t i = 0; same && i < pts.size(); ++i) {
                same = std::abs(pts[i].first - ref[i].first) <= 1e-9;
            }
            if (!same) {
                std::vector<double> a, b;
                for (const auto &p : ref) a.push_back(p.first);
                for (const auto &p : pts) b.push_back(p.first);
                throw DomainError("mismatched theta grids: t=" + std::to_string(series.begin()->first) + " has [" +
                                  join(a) + "] but t=" + std::to_string(t) + " has [" + join(b) + "]");
            }
        }
    }

    double th_lo = kThetaMin, th_hi = kThetaMax;
    if (!series.empty()) {
        th_lo = series.begin()->second.front().first;
        th_hi = series.begin()->second.back().first;
        std::vector<double> outside;
        for (const auto &e : estimates) {
            if (e.theta < th_lo - 1e-9 || e.theta > th_hi + 1e-9) {
                outside.push_back(e.theta);
            }
        }
        if (!outside.empty()) {
            throw DomainError("mismatched theta grids: estimate theta values [" + join(outside) +
                              "] lie outside the curve range [" + join({th_lo, th_hi}) + "]");
        }
    } else if (!estimates.empty()) {
        th_lo = th_hi = estimates.front().theta;
        for (const auto &e : estimates) {
            th_lo = std::min(th_lo, e.theta);
            th_hi = std::max(th_hi, e.theta);
        }
    }
    if (th_hi - th_lo < 1e-6) {
        th_lo -= 0.05;
        th_hi += 0.05;
    }

    std::vector<int> curve_ts = options.curve_ts;
    const int t_max = series.empty() ? 0 : series.rbegin()->first;
    if (curve_ts.empty()) {
        std::set<int> chosen;
        for (const auto &e : estimates) {
            chosen.insert(e.t);
        }
        if (chosen.empty()) {
            for (int t = 1; t <= 4; ++t) chosen.insert(t);
        }
        if (t_max > 0) chosen.insert(t_max);
        for (int t : chosen) {
            if (series.count(t)) curve_ts.push_back(t);
        }
    }
    std::set<int> marker_ts;
    for (const auto &e : estimates) marker_ts.insert(e.t);
    std::vector<int> color_ts = curve_ts;
    for (int t : marker_ts) {
        if (std::find(color_ts.begin(), color_ts.end(), t) == color_ts.end()) color_ts.push_back(t);
    }

    double y_lo = 0.0, y_hi = 0.5;
    for (const auto &e : estimates) {
        y_lo = std::min(y_lo, e.z_hat - 1.96 * e.se);
        y_hi = std::max(y_hi, e.z_hat + 1.96 * e.se);
    }

    const double w = options.width, h = options.height;
    const double ml = 64, mr = 120, mt = 36, mb = 52;
    const double pw = w - ml - mr, ph = h - mt - mb;
    auto X = [&](double th) { return ml + (th - th_lo) / (th_hi - th_lo) * pw; };
    auto Y = [&](double z) { return mt + (y_hi - z) / (y_hi - y_lo) * ph; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
      << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\" font-family=\"sans-serif\" "
      << "font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        s << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"20\" text-anchor=\"middle\">" << options.title
          << "</text>\n";
    }
    s << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double th = th_lo + (th_hi - th_lo) * i / 5.0;
        s << "<line x1=\"" << fmt(X(th)) << "\" y1=\"" << fmt(mt + ph) << "\" x2=\"" << fmt(X(th)) << "\" y2=\""
          << fmt(mt + ph + 5) << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << fmt(X(th)) << "\" y=\"" << fmt(mt + ph + 18) << "\" text-anchor=\"middle\">"
          << fmt(th) << "</text>\n";
        const double z = y_lo + (y_hi - y_lo) * i / 5.0;
        s << "<line x1=\"" << fmt(ml - 5) << "\" y1=\"" << fmt(Y(z)) << "\" x2=\"" << fmt(ml) << "\" y2=\""
          << fmt(Y(z)) << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << fmt(ml - 8) << "\" y=\"" << fmt(Y(z) + 4) << "\" text-anchor=\"end\">" << fmt(z)
          << "</text>\n";
    }
    s << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(h - 12) << "\" text-anchor=\"middle\">theta</text>\n";
    s << "<text x=\"16\" y=\"" << fmt(mt + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fmt(mt + ph / 2) << ")\">Z</text>\n";

    int legend_row = 0;
    auto legend = [&](const std::string &color, const std::string &dash, const std::string &label) {
        const double ly = mt + 14 + 18 * legend_row++;
        s << "<line x1=\"" << fmt(ml + pw + 10) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(ml + pw + 40)
          << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << dash << "/>\n";
        s << "<text x=\"" << fmt(ml + pw + 46) << "\" y=\"" << fmt(ly + 4) << "\">" << label << "</text>\n";
    };

    for (int t : curve_ts) {
        const auto &pts = series.at(t);
        const std::string dash = t == t_max && curve_ts.size() > 1 ? " stroke-dasharray=\"8,3,2,3\""
                                                                    : " stroke-dasharray=\"6,4\"";
        const std::string color = t == t_max && curve_ts.size() > 1 ? "#555555" : color_for(t, color_ts);
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"" << dash << " points=\"";
        for (size_t i = 0; i < pts.size(); ++i) {
            s << (i ? " " : "") << fmt(X(pts[i].first)) << ',' << fmt(Y(pts[i].second));
        }
        s << "\"/>\n";
        legend(color, dash, "pool t=" + std::to_string(t));
    }

    for (int t : marker_ts) {
        const std::string color = color_for(t, color_ts);
        for (const auto &e : estimates) {
            if (e.t != t) continue;
            const double x = X(e.theta);
            const double bar = 1.96 * e.se;
            s << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(Y(e.z_hat - bar)) << "\" x2=\"" << fmt(x)
              << "\" y2=\"" << fmt(Y(e.z_hat + bar)) << "\" stroke=\"" << color << "\"/>\n";
            s << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(Y(e.z_hat)) << "\" r=\"3.5\" fill=\"" << color
              << "\"/>\n";
        }
        legend(color, "", "estimate t=" + std::to_string(t));
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace qtree
