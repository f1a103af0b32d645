#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rainbench/benchmark.h"

namespace rainbench {

enum class TableStyle { kText, kCsv, kStructured };

/// Text style rounds to two decimals ("0.79", "20.68dB", "+4.49dB") and
/// shows "-" in the baseline's gain columns. Csv and structured styles
/// carry full precision and parse back with parse_table.
std::string emit_table(const BenchmarkTable& table, TableStyle style);
BenchmarkTable parse_table(std::string_view text, TableStyle style);

// One Table-2 style line for a row, fields separated by two spaces.
std::string format_table_row(const BenchmarkRow& row);

/// Scores file: header `pair_id,row_label,ssim,psnr_hvs_m,gain_ssim,gain_psnr_hvs_m`,
/// one row per record, then a summary block with one five-number summary
/// row per row_label. Throws EmptyInput.
std::string emit_scores(std::span<const ScoreRecord> records);

// Data rows of a scores file; the summary block is skipped.
std::vector<ScoreRecord> parse_scores(std::string_view text);

std::string format_fixed(double v, int decimals);
std::string format_signed(double v, int decimals);

}  // namespace rainbench
