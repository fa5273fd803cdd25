/*
 * Copyright 2026 The GPDR Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GPDR_MODEL_IO_HPP
#define GPDR_MODEL_IO_HPP

#include <string>

#include "gpdr/exact.hpp"

namespace gpdr {

/// `gpdr-model-v1` document: kernel spec, fit config, training ids, and the
/// representer weights alpha. The Cholesky factor is not stored; loading
/// refits it from the supplied dataset (which must carry the same subjects
/// in the same order).
std::string model_to_json(const ExactPosterior& post);
ExactPosterior model_from_json(const std::string& text, const Dataset& ds);

void save_model_file(const ExactPosterior& post, const std::string& path);
ExactPosterior load_model_file(const std::string& path, const Dataset& ds);

}  // namespace gpdr

#endif  // GPDR_MODEL_IO_HPP
