// Copyright 2026 The QMapLab Authors
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

#ifndef QMAPLAB_VERSION_HPP_
#define QMAPLAB_VERSION_HPP_

#ifndef QMAPLAB_VERSION
#define QMAPLAB_VERSION "0.1.0"
#endif

namespace qmaplab {

inline constexpr const char* kVersion = QMAPLAB_VERSION;

}  // namespace qmaplab

#endif  // QMAPLAB_VERSION_HPP_
