#pragma once

// File formats: region CSVs, case series, event/trace JSONL and result CSVs.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hotspot/simcore.hpp"
#include "hotspot/synthpop.hpp"

namespace hotspot {

/// tile_id,lat,lon,population
std::vector<Tile> read_tiles_csv(const std::filesystem::path& path);
/// site_id,category,lat,lon
std::vector<Site> read_sites_csv(const std::filesystem::path& path);

struct CaseRow {
  std::string date;
  double cumulative_positive = 0.0;
};
/// date,cumulative_positive. Errors name the offending line.
std::vector<CaseRow> read_cases_csv(const std::filesystem::path& path);
void write_cases_csv(const std::filesystem::path& path, std::span<const CaseRow> rows);

/// One JSON object per line: {"t_h","kind","subject","infector","site"[,"positive"]}.
void write_events_jsonl(const std::filesystem::path& path, const EventLog& log);
std::string events_jsonl(const EventLog& log);
/// Reads records back; population and horizon are not part of the file.
std::vector<LogRecord> read_events_jsonl(const std::filesystem::path& path);

/// One JSON object per visit: {"individual","site","t_arrive_h","t_depart_h"}.
void write_traces_jsonl(const std::filesystem::path& path, const World& world);

/// t_enqueue_h,t_outcome_h,individual,result
void write_tests_csv(const std::filesystem::path& path, std::span<const TestRecord> tests);

struct SiteRisk {
  SiteId site = kNoSite;
  double p_hat = 0.0;
};
/// site_id,lat,lon,category,p_hat, in the given order.
void write_site_risk_csv(const std::filesystem::path& path, std::span<const SiteRisk> risks,
                         const World& world);

}  // namespace hotspot
