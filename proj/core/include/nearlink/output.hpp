// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string_view>

namespace nearlink
{

// Writes `content` to `<path>.tmp` and renames it over `path`, creating
// parent directories. Throws IoError with the path on failure.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

} // namespace nearlink
