#include "rainbench/report.h"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

#include "rainbench/error.h"
#include "rainbench/stats.h"

namespace rainbench {

namespace {

std::string full_precision(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = end + 1;
  }
  return out;
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::kSyntaxError, "not a number: '" + s + "'");
  }
}

constexpr std::string_view kTableCsvHeader =
    "row_label,ssim_mean,ssim_std,ssim_gain,psnr_hvs_m_mean,psnr_hvs_m_std,psnr_hvs_m_gain";
constexpr std::string_view kScoresHeader = "pair_id,row_label,ssim,psnr_hvs_m,gain_ssim,gain_psnr_hvs_m";

nlohmann::ordered_json stats_json(const MetricStats& s) {
  nlohmann::ordered_json j;
  j["mean"] = s.mean;
  j["std"] = s.std;
  j["gain"] = s.gain ? nlohmann::ordered_json(*s.gain) : nlohmann::ordered_json(nullptr);
  return j;
}

MetricStats stats_from_json(const nlohmann::ordered_json& j) {
  MetricStats s{j.at("mean").get<double>(), j.at("std").get<double>(), std::nullopt};
  if (!j.at("gain").is_null()) s.gain = j.at("gain").get<double>();
  return s;
}

}  // namespace

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s = buf;
  // Never print "-0.00".
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string format_signed(double v, int decimals) {
  std::string s = format_fixed(v, decimals);
  return s.front() == '-' ? s : "+" + s;
}

std::string format_table_row(const BenchmarkRow& row) {
  auto gain = [](const std::optional<double>& g, std::string_view unit) {
    return g ? format_signed(*g, 2) + std::string(unit) : std::string("-");
  };
  std::string out = row.label;
  out += "  " + format_fixed(row.ssim.mean, 2);
  out += "  " + format_fixed(row.ssim.std, 2);
  out += "  " + gain(row.ssim.gain, "");
  out += "  " + format_fixed(row.psnr_hvs_m.mean, 2) + "dB";
  out += "  " + format_fixed(row.psnr_hvs_m.std, 2) + "dB";
  out += "  " + gain(row.psnr_hvs_m.gain, "dB");
  return out;
}

std::string emit_table(const BenchmarkTable& table, TableStyle style) {
  std::ostringstream out;
  switch (style) {
    case TableStyle::kText:
      out << "Quality results for " << table.n << " samples\n";
      out << "row  SSIM mean  SSIM sigma  SSIM gain  PSNR-HVS-M mean  PSNR-HVS-M sigma  PSNR-HVS-M gain\n";
      for (const auto& row : table.rows) out << format_table_row(row) << "\n";
      out << "sigma: sample standard deviation (n-1); gain: mean minus " << table.baseline_label << " mean\n";
      break;
    case TableStyle::kCsv:
      out << "# n=" << table.n << ",baseline=" << csv_field(table.baseline_label) << "\n";
      out << kTableCsvHeader << "\n";
      for (const auto& r : table.rows) {
        out << csv_field(r.label) << ',' << full_precision(r.ssim.mean) << ',' << full_precision(r.ssim.std) << ','
            << (r.ssim.gain ? full_precision(*r.ssim.gain) : "") << ',' << full_precision(r.psnr_hvs_m.mean) << ','
            << full_precision(r.psnr_hvs_m.std) << ','
            << (r.psnr_hvs_m.gain ? full_precision(*r.psnr_hvs_m.gain) : "") << "\n";
      }
      break;
    case TableStyle::kStructured: {
      nlohmann::ordered_json doc;
      doc["n"] = table.n;
      doc["baseline_label"] = table.baseline_label;
      doc["sigma"] = "sample (n-1)";
      doc["rows"] = nlohmann::ordered_json::array();
      for (const auto& r : table.rows) {
        nlohmann::ordered_json row;
        row["row_label"] = r.label;
        row["ssim"] = stats_json(r.ssim);
        row["psnr_hvs_m"] = stats_json(r.psnr_hvs_m);
        doc["rows"].push_back(std::move(row));
      }
      out << doc.dump(2) << "\n";
      break;
    }
  }
  return out.str();
}

BenchmarkTable parse_table(std::string_view text, TableStyle style) {
  BenchmarkTable table;
  table.baseline_label.clear();
  if (style == TableStyle::kStructured) {
    try {
      const auto doc = nlohmann::ordered_json::parse(text.begin(), text.end());
      table.n = doc.at("n").get<std::size_t>();
      table.baseline_label = doc.at("baseline_label").get<std::string>();
      for (const auto& r : doc.at("rows")) {
        table.rows.push_back(
            {r.at("row_label").get<std::string>(), stats_from_json(r.at("ssim")), stats_from_json(r.at("psnr_hvs_m"))});
      }
    } catch (const nlohmann::ordered_json::exception& e) {
      throw Error(ErrorKind::kSyntaxError, std::string("table: ") + e.what());
    }
    return table;
  }
  if (style != TableStyle::kCsv) throw Error(ErrorKind::kInvalidArgument, "text tables are display-only");

  const auto lines = lines_of(text);
  if (lines.size() < 2 || !lines[0].starts_with("# n=") || lines[1] != kTableCsvHeader) {
    throw Error(ErrorKind::kSyntaxError, "table csv header missing");
  }
  const auto meta = split_csv_line(lines[0].substr(2));
  if (meta.size() != 2 || !meta[1].starts_with("baseline=")) throw Error(ErrorKind::kSyntaxError, "bad table meta");
  table.n = static_cast<std::size_t>(parse_double(meta[0].substr(2)));
  table.baseline_label = meta[1].substr(9);
  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split_csv_line(lines[i]);
    if (f.size() != 7) throw Error(ErrorKind::kSyntaxError, "table row " + std::to_string(i) + " has wrong arity");
    auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<double>(parse_double(s)); };
    table.rows.push_back({f[0], {parse_double(f[1]), parse_double(f[2]), opt(f[3])},
                          {parse_double(f[4]), parse_double(f[5]), opt(f[6])}});
  }
  return table;
}

std::string emit_scores(std::span<const ScoreRecord> records) {
  if (records.empty()) throw Error(ErrorKind::kEmptyInput, "no score records");
  std::ostringstream out;
  out << kScoresHeader << "\n";
  std::vector<std::string> labels;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_label;
  for (const auto& r : records) {
    out << csv_field(r.pair_id) << ',' << csv_field(r.row_label) << ',' << full_precision(r.ssim) << ','
        << full_precision(r.psnr_hvs_m) << ',' << full_precision(r.gain_ssim) << ','
        << full_precision(r.gain_psnr_hvs_m) << "\n";
    auto [it, inserted] = by_label.try_emplace(r.row_label);
    if (inserted) labels.push_back(r.row_label);
    it->second.first.push_back(r.ssim);
    it->second.second.push_back(r.psnr_hvs_m);
  }
  out << "\n# summary: quantiles by linear interpolation, h=(n-1)p, q=x[floor(h)]+(h-floor(h))*(x[floor(h)+1]-x[floor(h)])\n";
  out << "row_label,n,ssim_min,ssim_q1,ssim_median,ssim_q3,ssim_max,"
         "psnr_hvs_m_min,psnr_hvs_m_q1,psnr_hvs_m_median,psnr_hvs_m_q3,psnr_hvs_m_max\n";
  for (const auto& label : labels) {
    const auto& [s, p] = by_label.at(label);
    const FiveNumber fs = five_number(s);
    const FiveNumber fp = five_number(p);
    out << csv_field(label) << ',' << s.size();
    for (const FiveNumber* f : {&fs, &fp}) {
      out << ',' << full_precision(f->min) << ',' << full_precision(f->q1) << ',' << full_precision(f->median)
          << ',' << full_precision(f->q3) << ',' << full_precision(f->max);
    }
    out << "\n";
  }
  return out.str();
}

std::vector<ScoreRecord> parse_scores(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != kScoresHeader) throw Error(ErrorKind::kSyntaxError, "scores header missing");
  std::vector<ScoreRecord> out;
  for (std::size_t i = 1; i < lines.size() && !lines[i].empty(); ++i) {
    const auto f = split_csv_line(lines[i]);
    if (f.size() != 6) throw Error(ErrorKind::kSyntaxError, "scores row " + std::to_string(i) + " has wrong arity");
    out.push_back({f[0], f[1], parse_double(f[2]), parse_double(f[3]), parse_double(f[4]), parse_double(f[5])});
  }
  return out;
}

}  // namespace rainbench
