#include "fcb/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fcb/error.hpp"

namespace fcb {

using nlohmann::json;
using nlohmann::ordered_json;

TableFormat parse_table_format(std::string_view s) {
  if (s == "plain") return TableFormat::plain;
  if (s == "markdown") return TableFormat::markdown;
  if (s == "csv") return TableFormat::csv;
  if (s == "json") return TableFormat::json;
  throw ReportError("unknown format '" + std::string(s) + "'");
}

std::string_view file_extension(TableFormat f) noexcept {
  switch (f) {
    case TableFormat::plain: return "txt";
    case TableFormat::markdown: return "md";
    case TableFormat::csv: return "csv";
    case TableFormat::json: return "json";
  }
  return "txt";
}

std::string format_4dp(double v) {
  if (!std::isfinite(v)) return "n/a";
  // printf rounds the exact binary value; exact ties follow the default
  // round-to-nearest-even mode.
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s(buf);
  if (s == "-0.0000") s = "0.0000";
  return s;
}

std::set<std::pair<std::string, std::string>> compute_bold_set(
    const std::vector<ReportRow>& rows, const std::vector<std::string>& models) {
  std::set<std::pair<std::string, std::string>> bold;
  for (const auto& model : models) {
    std::optional<double> best;
    for (const auto& row : rows) {
      if (row.kind != SourceKind::generated) continue;
      const auto& cell = row.cells.at(model);
      if (cell.mean && (!best || *cell.mean < *best)) best = cell.mean;
    }
    if (!best) continue;
    for (const auto& row : rows) {
      if (row.kind != SourceKind::generated) continue;
      const auto& cell = row.cells.at(model);
      if (cell.mean && *cell.mean == *best) bold.emplace(row.source, model);
    }
  }
  return bold;
}

BenchmarkReport build_report(std::span<const SourceAggregate> aggregates,
                             std::span<const SourceInfo> sources,
                             std::span<const std::string> models, const RunMetadata& meta) {
  if (aggregates.empty()) throw ReportError("no aggregates to report");
  BenchmarkReport r;
  r.mode = aggregates.front().mode;
  r.metric = aggregates.front().metric;
  r.models.assign(models.begin(), models.end());
  r.metadata = meta;

  std::vector<SourceInfo> ordered;
  for (const auto& s : sources) if (s.kind == SourceKind::real) ordered.push_back(s);
  for (const auto& s : sources) if (s.kind == SourceKind::generated) ordered.push_back(s);

  for (const auto& src : ordered) {
    ReportRow row{src.name, src.kind, {}};
    for (const auto& model : models) {
      const auto it = std::find_if(aggregates.begin(), aggregates.end(), [&](const auto& a) {
        return a.source_name == src.name && a.model_id == model;
      });
      if (it == aggregates.end()) {
        throw ReportError("incomplete grid: no scores for source '" + src.name +
                          "' and model '" + model + "'");
      }
      if (it->mode != r.mode || it->metric != r.metric) {
        throw ReportError("aggregates mix modes or metrics");
      }
      row.cells[model] = ReportCell{it->mean_of_video_means, it->std_of_video_means,
                                    it->per_video.size(), it->n_unscorable};
    }
    r.rows.push_back(std::move(row));
  }
  r.bold_set = compute_bold_set(r.rows, r.models);
  return r;
}

BenchmarkReport build_report(std::span<const SourceAggregate> aggregates, const Manifest& manifest,
                             const RunMetadata& meta) {
  std::vector<SourceInfo> sources;
  for (const auto& s : manifest.sources) sources.push_back({s.name, s.kind});
  return build_report(aggregates, sources, manifest.models, meta);
}

namespace {

bool is_bold(const BenchmarkReport& r, const std::string& source, const std::string& model) {
  return r.bold_set.count({source, model}) != 0;
}

std::string cell_text(const ReportCell& c) {
  return c.mean ? format_4dp(*c.mean) : std::string("n/a");
}

std::string title(const BenchmarkReport& r) {
  return std::string(to_string(r.metric)) + " distance, " + std::string(to_string(r.mode)) +
         (r.mode == ComparisonMode::mode1 ? " (all frames vs. reference frame)"
                                          : " (" + std::to_string(r.metadata.num_pairs) +
                                                " random frame pairs)");
}

std::string metadata_line(const RunMetadata& m) {
  std::ostringstream os;
  os << "seed=" << m.seed << " num_pairs=" << m.num_pairs << " max_dim=" << m.max_dim
     << " stride=" << m.stride << " reference=" << m.reference
     << " include_self=" << (m.include_self ? "true" : "false")
     << " registry=" << m.registry_hash << " version=" << m.toolkit_version;
  return os.str();
}

std::vector<std::string> footnotes(const BenchmarkReport& r) {
  std::vector<std::string> notes;
  for (const auto& row : r.rows) {
    for (const auto& model : r.models) {
      const auto& c = row.cells.at(model);
      if (c.n_unscorable == 0) continue;
      notes.push_back(row.source + " / " + model + ": " + std::to_string(c.n_unscorable) +
                      " unscorable video(s) excluded" + (c.mean ? "" : "; no scorable video (n/a)"));
    }
  }
  return notes;
}

std::string render_plain(const BenchmarkReport& r) {
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"Source"});
  for (const auto& m : r.models) grid.back().push_back(m);
  for (const auto& row : r.rows) {
    std::vector<std::string> line{row.source};
    for (const auto& m : r.models) {
      line.push_back(cell_text(row.cells.at(m)) + (is_bold(r, row.source, m) ? "*" : ""));
    }
    grid.push_back(std::move(line));
  }
  std::vector<std::size_t> width(grid.front().size(), 0);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }

  std::ostringstream os;
  os << title(r) << "\n";
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) os << "  ";
      if (i == 0) {
        os << line[i] << std::string(width[i] - line[i].size(), ' ');
      } else {
        os << std::string(width[i] - line[i].size(), ' ') << line[i];
      }
    }
    os << "\n";
  };
  emit(grid.front());
  std::size_t total = 0;
  for (auto w : width) total += w;
  os << std::string(total + 2 * (width.size() - 1), '-') << "\n";
  for (std::size_t i = 1; i < grid.size(); ++i) emit(grid[i]);
  os << "\n* lowest among generated sources\n";
  for (const auto& n : footnotes(r)) os << "n/a: " << n << "\n";
  os << metadata_line(r.metadata) << "\n";
  return os.str();
}

std::string render_markdown(const BenchmarkReport& r) {
  std::ostringstream os;
  os << "**" << title(r) << "**\n\n";
  os << "| Source |";
  for (const auto& m : r.models) os << " " << m << " |";
  os << "\n|:--|";
  for (std::size_t i = 0; i < r.models.size(); ++i) os << "--:|";
  os << "\n";
  for (const auto& row : r.rows) {
    os << "| " << row.source << " |";
    for (const auto& m : r.models) {
      const auto text = cell_text(row.cells.at(m));
      os << " " << (is_bold(r, row.source, m) ? "**" + text + "**" : text) << " |";
    }
    os << "\n";
  }
  os << "\nBold: lowest among generated sources.\n";
  for (const auto& n : footnotes(r)) os << "\n- n/a: " << n;
  if (!footnotes(r).empty()) os << "\n";
  os << "\n`" << metadata_line(r.metadata) << "`\n";
  return os.str();
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

std::string render_csv(const BenchmarkReport& r) {
  std::ostringstream os;
  os << "# " << metadata_line(r.metadata) << "\n";
  os << "mode,metric,source,kind,model,mean,std_mean_across_videos,n_videos,n_unscorable,is_bold\n";
  for (const auto& row : r.rows) {
    for (const auto& m : r.models) {
      const auto& c = row.cells.at(m);
      os << to_string(r.mode) << "," << to_string(r.metric) << "," << csv_field(row.source) << ","
         << to_string(row.kind) << "," << csv_field(m) << "," << cell_text(c) << ","
         << (c.mean ? format_4dp(c.std_across_videos) : std::string("n/a")) << "," << c.n_videos
         << "," << c.n_unscorable << "," << (is_bold(r, row.source, m) ? "true" : "false")
         << "\n";
    }
  }
  return os.str();
}

std::string render_json(const BenchmarkReport& r) {
  ordered_json j;
  j["format"] = "fcb-report";
  j["version"] = 1;
  j["mode"] = to_string(r.mode);
  j["metric"] = to_string(r.metric);
  j["models"] = r.models;
  ordered_json meta;
  meta["seed"] = r.metadata.seed;
  meta["num_pairs"] = r.metadata.num_pairs;
  meta["max_dim"] = r.metadata.max_dim;
  meta["stride"] = r.metadata.stride;
  meta["reference"] = r.metadata.reference;
  meta["include_self"] = r.metadata.include_self;
  meta["registry_hash"] = r.metadata.registry_hash;
  meta["toolkit_version"] = r.metadata.toolkit_version;
  j["metadata"] = meta;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json jr;
    jr["source"] = row.source;
    jr["kind"] = to_string(row.kind);
    ordered_json cells = ordered_json::array();
    for (const auto& m : r.models) {
      const auto& c = row.cells.at(m);
      ordered_json jc;
      jc["model"] = m;
      jc["mean"] = c.mean ? ordered_json(*c.mean) : ordered_json(nullptr);
      jc["display"] = cell_text(c);
      jc["std_mean_across_videos"] = c.std_across_videos;
      jc["n_videos"] = c.n_videos;
      jc["n_unscorable"] = c.n_unscorable;
      jc["is_bold"] = is_bold(r, row.source, m);
      cells.push_back(std::move(jc));
    }
    jr["cells"] = std::move(cells);
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

}  // namespace

std::string render_table(const BenchmarkReport& r, TableFormat fmt) {
  switch (fmt) {
    case TableFormat::plain: return render_plain(r);
    case TableFormat::markdown: return render_markdown(r);
    case TableFormat::csv: return render_csv(r);
    case TableFormat::json: return render_json(r);
  }
  return {};
}

BenchmarkReport parse_report_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "fcb-report") throw ReportError("not an fcb report");
    BenchmarkReport r;
    r.mode = parse_mode(j.at("mode").get<std::string>());
    r.metric = parse_metric(j.at("metric").get<std::string>());
    r.models = j.at("models").get<std::vector<std::string>>();
    const auto& m = j.at("metadata");
    r.metadata.seed = m.at("seed").get<std::uint64_t>();
    r.metadata.num_pairs = m.at("num_pairs").get<std::size_t>();
    r.metadata.max_dim = m.at("max_dim").get<int>();
    r.metadata.stride = m.at("stride").get<std::size_t>();
    r.metadata.reference = m.at("reference").get<std::string>();
    r.metadata.include_self = m.at("include_self").get<bool>();
    r.metadata.registry_hash = m.at("registry_hash").get<std::string>();
    r.metadata.toolkit_version = m.at("toolkit_version").get<std::string>();
    for (const auto& jr : j.at("rows")) {
      ReportRow row;
      row.source = jr.at("source").get<std::string>();
      row.kind = parse_source_kind(jr.at("kind").get<std::string>());
      for (const auto& jc : jr.at("cells")) {
        ReportCell c;
        if (!jc.at("mean").is_null()) c.mean = jc["mean"].get<double>();
        c.std_across_videos = jc.at("std_mean_across_videos").get<double>();
        c.n_videos = jc.at("n_videos").get<std::size_t>();
        c.n_unscorable = jc.at("n_unscorable").get<std::size_t>();
        const auto model = jc.at("model").get<std::string>();
        if (jc.at("is_bold").get<bool>()) r.bold_set.emplace(row.source, model);
        row.cells[model] = c;
      }
      r.rows.push_back(std::move(row));
    }
    return r;
  } catch (const json::exception& e) {
    throw ReportError(std::string("malformed report json: ") + e.what());
  }
}

std::string emit_plot_data(const BenchmarkReport& mode1, const BenchmarkReport& mode2) {
  if (mode1.mode != ComparisonMode::mode1 || mode2.mode != ComparisonMode::mode2) {
    throw ReportError("plot data needs a mode1 and a mode2 report");
  }
  if (mode1.metric != mode2.metric) throw ReportError("plot data: metric differs between modes");
  if (mode1.models != mode2.models) throw ReportError("plot data: model columns differ between modes");
  if (mode1.rows.size() != mode2.rows.size()) throw ReportError("plot data: source rows differ between modes");
  for (std::size_t i = 0; i < mode1.rows.size(); ++i) {
    if (mode1.rows[i].source != mode2.rows[i].source || mode1.rows[i].kind != mode2.rows[i].kind) {
      throw ReportError("plot data: source rows differ between modes");
    }
  }
  const bool any_generated = std::any_of(mode1.rows.begin(), mode1.rows.end(), [](const auto& r) {
    return r.kind == SourceKind::generated;
  });
  if (!any_generated) throw ReportError("plot data: no generated source");

  std::ostringstream os;
  os << "mode,metric,source,kind,model,mean\n";
  for (const auto* rep : {&mode1, &mode2}) {
    for (const auto& row : rep->rows) {
      for (const auto& m : rep->models) {
        os << to_string(rep->mode) << "," << to_string(rep->metric) << "," << csv_field(row.source)
           << "," << to_string(row.kind) << "," << csv_field(m) << ","
           << cell_text(row.cells.at(m)) << "\n";
      }
    }
  }
  return os.str();
}

}  // namespace fcb
