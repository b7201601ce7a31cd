#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "torqueid/acquisition.hpp"

namespace torqueid {

/// `t,q1..q6,dq1..dq6,ddq1..ddq6,tau1..tau6`
std::string dataset_csv_header();

/// UTF-8, LF line endings, shortest round-trip decimals.
std::string format_dataset_csv(const acquisition::Dataset& dataset);
acquisition::Dataset parse_dataset_csv(std::string_view text, const std::string& source = "<string>");

void write_dataset_csv(const acquisition::Dataset& dataset, const std::filesystem::path& path);
acquisition::Dataset read_dataset_csv(const std::filesystem::path& path);

/// Writes `contents` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace torqueid
