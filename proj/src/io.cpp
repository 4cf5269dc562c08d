#include "hotspot/io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace hotspot {

namespace {

using json = nlohmann::json;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  const auto e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Reads a CSV with a required header; calls row(cells, line_number) per data line.
template <class Row>
void read_csv(const std::filesystem::path& path, const std::vector<std::string>& header, Row row) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (!have_header) {
      if (cells != header) {
        std::string want;
        for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
        throw InputError(fmt::format("{}:{}: expected header '{}'", path.string(), line_no, want));
      }
      have_header = true;
      continue;
    }
    if (cells.size() != header.size())
      throw InputError(fmt::format("{}:{}: expected {} columns, found {}", path.string(), line_no,
                                   header.size(), cells.size()));
    row(cells, line_no);
  }
  if (!have_header) throw InputError(path.string() + ": empty file");
}

double parse_number(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw InputError(fmt::format("{}:{}: '{}' is not a finite number", path.string(), line, s));
  return v;
}

}  // namespace

std::vector<Tile> read_tiles_csv(const std::filesystem::path& path) {
  std::vector<Tile> tiles;
  read_csv(path, {"tile_id", "lat", "lon", "population"}, [&](const auto& c, std::size_t line) {
    Tile t{c[0], parse_number(c[1], path, line), parse_number(c[2], path, line),
           parse_number(c[3], path, line)};
    if (t.population < 0.0) throw InputError(fmt::format("{}:{}: negative population", path.string(), line));
    tiles.push_back(std::move(t));
  });
  return tiles;
}

std::vector<Site> read_sites_csv(const std::filesystem::path& path) {
  std::vector<Site> sites;
  read_csv(path, {"site_id", "category", "lat", "lon"}, [&](const auto& c, std::size_t line) {
    const auto cat = parse_category(c[1]);
    if (!cat) throw InputError(fmt::format("{}:{}: unknown site category '{}'", path.string(), line, c[1]));
    Site s;
    s.id = static_cast<SiteId>(sites.size());
    s.external_id = c[0];
    s.category = *cat;
    s.lat = parse_number(c[2], path, line);
    s.lon = parse_number(c[3], path, line);
    sites.push_back(std::move(s));
  });
  return sites;
}

std::vector<CaseRow> read_cases_csv(const std::filesystem::path& path) {
  std::vector<CaseRow> rows;
  read_csv(path, {"date", "cumulative_positive"}, [&](const auto& c, std::size_t line) {
    const double v = parse_number(c[1], path, line);
    if (v < 0.0) throw InputError(fmt::format("{}:{}: negative case count", path.string(), line));
    if (!rows.empty() && v < rows.back().cumulative_positive)
      throw InputError(fmt::format("{}:{}: cumulative counts must not decrease", path.string(), line));
    rows.push_back({c[0], v});
  });
  if (rows.empty()) throw InputError(path.string() + ": no case rows");
  return rows;
}

void write_cases_csv(const std::filesystem::path& path, std::span<const CaseRow> rows) {
  auto out = open_output(path);
  out << "date,cumulative_positive\n";
  for (const auto& r : rows) out << fmt::format("{},{}\n", r.date, r.cumulative_positive);
}

std::string events_jsonl(const EventLog& log) {
  std::string out;
  for (const auto& r : log.records) {
    out += fmt::format(R"({{"t_h":{},"kind":"{}","subject":{},"infector":{},"site":{})", r.t,
                       to_string(r.kind), r.subject,
                       r.infector == kNoPerson ? std::string("null") : std::to_string(r.infector),
                       r.site == kNoSite ? std::string("null") : std::to_string(r.site));
    if (r.kind == EventKind::TestOutcome) out += r.positive ? R"(,"positive":true)" : R"(,"positive":false)";
    out += "}\n";
  }
  return out;
}

void write_events_jsonl(const std::filesystem::path& path, const EventLog& log) {
  auto out = open_output(path);
  out << events_jsonl(log);
}

std::vector<LogRecord> read_events_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<LogRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      LogRecord r;
      r.t = j.at("t_h").get<double>();
      const auto kind = parse_event_kind(j.at("kind").get<std::string>());
      if (!kind) throw InputError("unknown event kind");
      r.kind = *kind;
      r.subject = j.at("subject").get<PersonId>();
      r.infector = j.at("infector").is_null() ? kNoPerson : j.at("infector").get<PersonId>();
      r.site = j.at("site").is_null() ? kNoSite : j.at("site").get<SiteId>();
      r.positive = j.value("positive", false);
      records.push_back(r);
    } catch (const std::exception& e) {
      throw InputError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return records;
}

void write_traces_jsonl(const std::filesystem::path& path, const World& world) {
  auto out = open_output(path);
  for (const auto& trace : world.traces)
    for (const auto& v : trace)
      out << fmt::format(R"({{"individual":{},"site":{},"t_arrive_h":{},"t_depart_h":{}}})" "\n",
                         v.person, v.site, v.arrive, v.depart);
}

void write_tests_csv(const std::filesystem::path& path, std::span<const TestRecord> tests) {
  auto out = open_output(path);
  out << "t_enqueue_h,t_outcome_h,individual,result\n";
  for (const auto& t : tests)
    out << fmt::format("{},{},{},{}\n", t.t_enqueue, t.t_outcome, t.person,
                       t.positive ? "positive" : "negative");
}

void write_site_risk_csv(const std::filesystem::path& path, std::span<const SiteRisk> risks,
                         const World& world) {
  auto out = open_output(path);
  out << "site_id,lat,lon,category,p_hat\n";
  for (const auto& r : risks) {
    const auto& s = world.sites[r.site];
    out << fmt::format("{},{},{},{},{}\n", s.external_id, s.lat, s.lon,
                       kCategoryNames[index_of(s.category)], r.p_hat);
  }
}

}  // namespace hotspot
