#include "phe/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

namespace phe {

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string quoted = "\"";
  for (const char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Shortest representation that parses back to the same double.
std::string num(double x) { return fmt::format("{}", x); }

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string label_slug(std::string_view label) {
  std::string slug;
  for (const char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
      slug += c;
    } else if (c == '(' || c == ',' || c == ' ') {
      if (!slug.empty() && slug.back() != '_') slug += '_';
    }
  }
  while (!slug.empty() && slug.back() == '_') slug.pop_back();
  return slug.empty() ? "policy" : slug;
}

std::vector<std::string> regret_file_names(std::span<const AggregateResult> results) {
  std::vector<std::string> names;
  std::set<std::string> used;
  for (const auto& r : results) {
    const std::string base = "regret_" + label_slug(r.label);
    std::string name = base + ".csv";
    for (int k = 2; !used.insert(name).second; ++k) name = fmt::format("{}_{}.csv", base, k);
    names.push_back(name);
  }
  return names;
}

void write_regret_csv(std::ostream& out, const AggregateResult& result) {
  out << "round,mean_regret,stderr\n";
  fmt::memory_buffer buf;
  for (std::size_t t = 0; t < result.mean_curve.size(); ++t) {
    fmt::format_to(std::back_inserter(buf), "{},{},{}\n", t + 1, result.mean_curve[t], result.stderr_curve[t]);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_summary_csv(std::ostream& out, std::span<const AggregateResult> results,
                       std::span<const std::string> files) {
  out << "policy,num_problems,half_horizon_mean_regret,final_mean_regret,final_stderr,file\n";
  for (std::size_t j = 0; j < results.size(); ++j) {
    const auto& r = results[j];
    const std::size_t n = r.mean_curve.size();
    const double half = n >= 2 ? r.mean_curve[n / 2 - 1] : (n ? r.mean_curve.back() : 0.0);
    out << fmt::format("{},{},{},{},{},{}\n", csv_field(r.label), r.num_problems, half,
                       n ? r.mean_curve.back() : 0.0, n ? r.stderr_curve.back() : 0.0,
                       j < files.size() ? files[j] : "");
  }
}

void write_manifest(std::ostream& out, const ExperimentConfig& config, std::span<const AggregateResult> results,
                    std::span<const std::string> files) {
  const std::string yaml = to_yaml(config);
  nlohmann::ordered_json manifest;
  manifest["name"] = config.name;
  manifest["config_hash"] = fmt::format("fnv1a64:{:016x}", fnv1a(yaml));
  manifest["master_seed"] = config.master_seed;
  manifest["config"] = yaml;
  manifest["files"] = files;
  nlohmann::ordered_json timing = nlohmann::ordered_json::object();
  for (const auto& r : results) timing[r.label] = r.wall_clock_seconds;
  manifest["wall_clock_seconds"] = timing;
  out << manifest.dump(2) << '\n';
}

void write_regret_svg(std::ostream& out, std::string_view title, std::span<const AggregateResult> results) {
  constexpr double W = 860, H = 520, left = 70, right = 200, top = 40, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;
  std::size_t n = 1;
  double ymax = 0.0;
  for (const auto& r : results) {
    n = std::max(n, r.mean_curve.size());
    for (const double y : r.mean_curve) ymax = std::max(ymax, y);
  }
  if (ymax <= 0.0) ymax = 1.0;
  ymax *= 1.05;
  const auto sx = [&](double t) { return left + pw * t / static_cast<double>(n); };
  const auto sy = [&](double y) { return top + ph * (1.0 - y / ymax); };

  out << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)", W, H,
                     W, H)
      << '\n';
  out << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';
  out << fmt::format(R"(<text x="{}" y="24" font-family="sans-serif" font-size="16">{}</text>)", left,
                     xml_escape(title))
      << '\n';
  out << fmt::format(R"(<g stroke="black" fill="none"><rect x="{}" y="{}" width="{}" height="{}"/></g>)", left, top,
                     pw, ph)
      << '\n';
  for (int k = 0; k <= 5; ++k) {
    const double t = static_cast<double>(n) * k / 5.0;
    const double y = ymax * k / 5.0;
    out << fmt::format(
        R"(<text x="{:.1f}" y="{:.1f}" font-family="sans-serif" font-size="11" text-anchor="middle">{:.0f}</text>)",
        sx(t), top + ph + 16, t);
    out << fmt::format(
        R"(<text x="{:.1f}" y="{:.1f}" font-family="sans-serif" font-size="11" text-anchor="end">{:.1f}</text>)",
        left - 6, sy(y) + 4, y);
    out << fmt::format(R"(<line x1="{:.1f}" y1="{:.1f}" x2="{:.1f}" y2="{:.1f}" stroke="#ddd"/>)", left, sy(y),
                       left + pw, sy(y))
        << '\n';
  }
  out << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-family="sans-serif" font-size="12" text-anchor="middle">)"
                     "round</text>\n",
                     left + pw / 2, H - 10);
  out << fmt::format(R"(<text x="16" y="{:.1f}" font-family="sans-serif" font-size="12" )"
                     R"svg(transform="rotate(-90 16 {:.1f})" text-anchor="middle">mean regret</text>)svg",
                     top + ph / 2, top + ph / 2)
      << '\n';

  for (std::size_t j = 0; j < results.size(); ++j) {
    const auto& curve = results[j].mean_curve;
    const char* colour = kPalette[j % std::size(kPalette)];
    const std::size_t stride = std::max<std::size_t>(1, curve.size() / 400);
    std::string points;
    for (std::size_t t = 0; t < curve.size(); t += stride) {
      points += fmt::format("{:.1f},{:.1f} ", sx(static_cast<double>(t + 1)), sy(curve[t]));
    }
    if (!curve.empty()) points += fmt::format("{:.1f},{:.1f}", sx(static_cast<double>(curve.size())), sy(curve.back()));
    out << fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>)", colour, points)
        << '\n';
    const double ly = top + 14 + 18 * static_cast<double>(j);
    out << fmt::format(R"(<line x1="{:.1f}" y1="{:.1f}" x2="{:.1f}" y2="{:.1f}" stroke="{}" stroke-width="2"/>)",
                       left + pw + 12, ly - 4, left + pw + 32, ly - 4, colour);
    out << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-family="sans-serif" font-size="12">{}</text>)",
                       left + pw + 38, ly, xml_escape(results[j].label))
        << '\n';
  }
  out << "</svg>\n";
}

void write_verify_csv(std::ostream& out, std::span<const TheoryCheckReport> reports) {
  out << "check,parameters,lhs,rhs,margin,pass\n";
  for (const auto& r : reports) {
    out << fmt::format("{},{},{},{},{},{}\n", csv_field(r.check), csv_field(r.parameters), num(r.lhs), num(r.rhs),
                       num(r.margin), r.pass ? "true" : "false");
  }
}

void write_bench_csv(std::ostream& out, std::span<const TimingRow> rows) {
  out << "policy,K,n,total_seconds,first_decile_per_round,last_decile_per_round\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{}\n", csv_field(r.label), r.num_arms, r.horizon, r.total_seconds,
                       r.first_decile_per_round, r.last_decile_per_round);
  }
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::filesystem::filesystem_error("cannot open for writing", path,
                                            std::make_error_code(std::errc::permission_denied));
  }
  body(out);
  out.flush();
  if (!out) {
    throw std::filesystem::filesystem_error("write failed", path, std::make_error_code(std::errc::io_error));
  }
}

}  // namespace phe
