#ifndef PCNRM_IO_H_
#define PCNRM_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "pcnrm/approx.h"
#include "pcnrm/model.h"
#include "pcnrm/policy.h"

namespace pcnrm {

namespace fs = std::filesystem;

// Shortest decimal that parses back to the same double.
std::string FormatDouble(double v);

// Minimal CSV: comma-separated, no quoting, header row required. Lists inside
// a field are ';'-separated.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int Column(const std::string& name) const;  // -1 if absent
};

CsvTable ReadCsv(const fs::path& path);
void WriteCsv(const fs::path& path, const CsvTable& table);

// Instance directory: resources.csv (id,capacity), products.csv
// (id,fare,resource_ids), segments.csv (id,lambda,choices,transitions),
// meta.csv (tau). Errors name the offending file.
InstanceSpec ReadInstanceDir(const fs::path& dir);
void WriteInstanceDir(const InstanceSpec& spec, const fs::path& dir);

void WriteSegmentsCsv(const std::vector<PreferenceList>& segments, const fs::path& path);

// product,weight rows; the reserved ids @no_purchase and @rate carry the
// no-purchase weight and the arrival rate (default 1). The segment id is the
// file stem.
MnlSegment ReadMnlCsv(const fs::path& path);

// Solution files.
void WriteClosingsCsv(const Instance& instance, const ClosingTimes& closing,
                      const fs::path& path);
ClosingTimes ReadClosingsCsv(const Instance& instance, const fs::path& path);
void WriteDurationsCsv(const Instance& instance, const OfferDurations& durations,
                       const fs::path& path);
OfferDurations ReadDurationsCsv(const Instance& instance, const fs::path& path);
void WriteDualsCsv(const Instance& instance, const std::vector<double>& duals,
                   const fs::path& path);
void WriteSalesCsv(const Instance& instance, const std::vector<double>& sales,
                   const fs::path& path);

// Policy mirrors: limits.csv (PB), periods.csv (OP), closings.csv (PC).
// Returns the file written, or an empty path for kinds without a mirror.
fs::path WritePolicyCsv(const Instance& instance, const Policy& policy,
                        const fs::path& dir);

std::string OfferIds(const Instance& instance, const Offer& offer);

}  // namespace pcnrm

#endif  // PCNRM_IO_H_
