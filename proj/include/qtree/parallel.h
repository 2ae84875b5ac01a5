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

#ifndef QTREE_PARALLEL_H
#define QTREE_PARALLEL_H

namespace qtree {

/// Worker count to use: `requested` if positive, else QTREE_WORKERS if set,
/// else the hardware concurrency.
int resolve_workers(int requested);

}  // namespace qtree

#endif
