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

#ifndef QTREE_PLOT_H
#define QTREE_PLOT_H

#include <string>
#include <vector>

#include "qtree/estimator.h"
#include "qtree/pool.h"

namespace qtree {

struct PlotOptions {
    int width = 720;
    int height = 480;
    std::vector<int> curve_ts;  // empty: the estimate depths (or 1..4) plus the largest curve depth
    std::string title;
};

/// Self-contained SVG: dashed pool curves per depth, the largest depth
/// dot-dashed, and estimate markers with 1.96*SE bars. Byte-identical for
/// identical inputs. Throws DomainError when the curve depths use different
/// theta grids or an estimate lies outside the curves' theta range.
std::string emit_plot(const std::vector<CurvePoint> &curves, const std::vector<EstimatorResult> &estimates,
                      const PlotOptions &options = {});

}  // namespace qtree

#endif
