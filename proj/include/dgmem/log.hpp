// Copyright 2026 The dgmem Authors
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

#ifndef DGMEM_LOG_HPP_
#define DGMEM_LOG_HPP_

namespace dgmem {

// Sets the spdlog level from DGMEM_LOG_LEVEL (trace..off); default info.
void init_logging();

}  // namespace dgmem

#endif  // DGMEM_LOG_HPP_
