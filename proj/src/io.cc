#include "pcnrm/io.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pcnrm/error.h"

namespace pcnrm {

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string Trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> List(const std::string& field) {
  if (Trim(field).empty()) return {};
  std::vector<std::string> out;
  for (const std::string& item : Split(field, ';')) out.push_back(Trim(item));
  return out;
}

std::string Where(const fs::path& path, std::size_t row) {
  return path.filename().string() + " row " + std::to_string(row + 2);
}

double ParseDouble(const std::string& s, const fs::path& path, std::size_t row) {
  const std::string t = Trim(s);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw InputError(Where(path, row) + ": not a number: '" + t + "'");
  }
  return v;
}

int ParseInt(const std::string& s, const fs::path& path, std::size_t row) {
  const std::string t = Trim(s);
  int v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw InputError(Where(path, row) + ": not an integer: '" + t + "'");
  }
  return v;
}

const std::string& Field(const CsvTable& t, std::size_t row, const std::string& name,
                         const fs::path& path) {
  const int c = t.Column(name);
  if (c < 0) throw InputError(path.filename().string() + ": missing column '" + name + "'");
  if (c >= static_cast<int>(t.rows[row].size())) {
    throw InputError(Where(path, row) + ": missing field '" + name + "'");
  }
  return t.rows[row][c];
}

std::string Join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) out.push_back(sep);
    out += items[k];
  }
  return out;
}

}  // namespace

int CsvTable::Column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return static_cast<int>(k);
  }
  return -1;
}

CsvTable ReadCsv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("missing " + path.filename().string() + ": " + path.string());
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      for (std::string& h : Split(line, ',')) t.header.push_back(Trim(h));
      first = false;
      continue;
    }
    if (Trim(line).empty()) continue;
    t.rows.push_back(Split(line, ','));
    for (std::string& f : t.rows.back()) f = Trim(f);
  }
  if (first) throw InputError(path.filename().string() + ": missing header row");
  return t;
}

void WriteCsv(const fs::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << Join(table.header, ',') << "\n";
  for (const auto& row : table.rows) out << Join(row, ',') << "\n";
}

InstanceSpec ReadInstanceDir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("not an instance directory: " + dir.string());
  InstanceSpec spec;

  const fs::path rp = dir / "resources.csv";
  const CsvTable r = ReadCsv(rp);
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    spec.resources.push_back({Field(r, k, "id", rp), ParseInt(Field(r, k, "capacity", rp), rp, k)});
  }

  const fs::path pp = dir / "products.csv";
  const CsvTable p = ReadCsv(pp);
  for (std::size_t k = 0; k < p.rows.size(); ++k) {
    spec.products.push_back({Field(p, k, "id", pp), ParseDouble(Field(p, k, "fare", pp), pp, k),
                             List(Field(p, k, "resource_ids", pp))});
  }

  const fs::path sp = dir / "segments.csv";
  const CsvTable s = ReadCsv(sp);
  for (std::size_t k = 0; k < s.rows.size(); ++k) {
    PreferenceList list;
    list.id = Field(s, k, "id", sp);
    list.rate = ParseDouble(Field(s, k, "lambda", sp), sp, k);
    list.choices = List(Field(s, k, "choices", sp));
    const int tc = s.Column("transitions");
    if (tc >= 0 && tc < static_cast<int>(s.rows[k].size())) {
      for (const std::string& v : List(s.rows[k][tc])) {
        list.transitions.push_back(ParseDouble(v, sp, k));
      }
    }
    spec.segments.push_back(std::move(list));
  }

  const fs::path mp = dir / "meta.csv";
  const CsvTable m = ReadCsv(mp);
  if (m.Column("tau") >= 0) {
    if (m.rows.size() != 1) throw InputError("meta.csv: expected exactly one row");
    spec.horizon = ParseDouble(Field(m, 0, "tau", mp), mp, 0);
  } else if (m.Column("key") >= 0 && m.Column("value") >= 0) {
    bool found = false;
    for (std::size_t k = 0; k < m.rows.size(); ++k) {
      if (Field(m, k, "key", mp) == "tau") {
        spec.horizon = ParseDouble(Field(m, k, "value", mp), mp, k);
        found = true;
      }
    }
    if (!found) throw InputError("meta.csv: no tau entry");
  } else {
    throw InputError("meta.csv: missing column 'tau'");
  }
  return spec;
}

void WriteSegmentsCsv(const std::vector<PreferenceList>& segments, const fs::path& path) {
  CsvTable t{{"id", "lambda", "choices", "transitions"}, {}};
  for (const PreferenceList& l : segments) {
    std::vector<std::string> th;
    for (double v : l.transitions) th.push_back(FormatDouble(v));
    t.rows.push_back({l.id, FormatDouble(l.rate), Join(l.choices, ';'), Join(th, ';')});
  }
  WriteCsv(path, t);
}

void WriteInstanceDir(const InstanceSpec& spec, const fs::path& dir) {
  fs::create_directories(dir);
  CsvTable r{{"id", "capacity"}, {}};
  for (const ResourceSpec& x : spec.resources) r.rows.push_back({x.id, std::to_string(x.capacity)});
  WriteCsv(dir / "resources.csv", r);
  CsvTable p{{"id", "fare", "resource_ids"}, {}};
  for (const ProductSpec& x : spec.products) {
    p.rows.push_back({x.id, FormatDouble(x.fare), Join(x.resources, ';')});
  }
  WriteCsv(dir / "products.csv", p);
  WriteSegmentsCsv(spec.segments, dir / "segments.csv");
  WriteCsv(dir / "meta.csv", CsvTable{{"tau"}, {{FormatDouble(spec.horizon)}}});
}

MnlSegment ReadMnlCsv(const fs::path& path) {
  const CsvTable t = ReadCsv(path);
  MnlSegment seg;
  seg.id = path.stem().string();
  seg.rate = 1.0;
  bool has_none = false;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const std::string& id = Field(t, k, "product", path);
    const double w = ParseDouble(Field(t, k, "weight", path), path, k);
    if (id == "@no_purchase") {
      seg.no_purchase_weight = w;
      has_none = true;
    } else if (id == "@rate") {
      seg.rate = w;
    } else {
      seg.products.push_back(id);
      seg.weights.push_back(w);
    }
  }
  if (!has_none) throw InputError(path.filename().string() + ": no @no_purchase row");
  return seg;
}

std::string OfferIds(const Instance& instance, const Offer& offer) {
  std::vector<std::string> ids;
  for (int j : offer.products()) ids.push_back(instance.product_id(j));
  return Join(ids, ';');
}

void WriteClosingsCsv(const Instance& instance, const ClosingTimes& closing,
                      const fs::path& path) {
  CsvTable t{{"product", "closing_time"}, {}};
  for (int j = 0; j < closing.size(); ++j) {
    t.rows.push_back({instance.product_id(j), FormatDouble(closing[j])});
  }
  WriteCsv(path, t);
}

ClosingTimes ReadClosingsCsv(const Instance& instance, const fs::path& path) {
  const CsvTable t = ReadCsv(path);
  ClosingTimes c{std::vector<double>(instance.num_products(), 0.0)};
  std::vector<char> seen(instance.num_products(), 0);
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto j = instance.FindProduct(Field(t, k, "product", path));
    if (!j) throw InputError(Where(path, k) + ": unknown product");
    c.times[*j] = ParseDouble(Field(t, k, "closing_time", path), path, k);
    seen[*j] = 1;
  }
  for (int j = 0; j < instance.num_products(); ++j) {
    if (!seen[j]) throw InputError(path.filename().string() + ": no row for product '" +
                                   instance.product_id(j) + "'");
  }
  CheckClosingTimes(instance, c);
  return c;
}

void WriteDurationsCsv(const Instance& instance, const OfferDurations& durations,
                       const fs::path& path) {
  CsvTable t{{"offer", "duration"}, {}};
  for (const auto& [offer, d] : durations) {
    t.rows.push_back({OfferIds(instance, offer), FormatDouble(d)});
  }
  WriteCsv(path, t);
}

OfferDurations ReadDurationsCsv(const Instance& instance, const fs::path& path) {
  const CsvTable t = ReadCsv(path);
  OfferDurations out;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    Offer offer(instance.num_products());
    for (const std::string& id : List(Field(t, k, "offer", path))) {
      const auto j = instance.FindProduct(id);
      if (!j) throw InputError(Where(path, k) + ": unknown product '" + id + "'");
      offer.insert(*j);
    }
    out[offer] += ParseDouble(Field(t, k, "duration", path), path, k);
  }
  return out;
}

void WriteDualsCsv(const Instance& instance, const std::vector<double>& duals,
                   const fs::path& path) {
  CsvTable t{{"resource", "dual"}, {}};
  for (std::size_t i = 0; i < duals.size(); ++i) {
    t.rows.push_back({instance.resource_id(static_cast<int>(i)), FormatDouble(duals[i])});
  }
  WriteCsv(path, t);
}

void WriteSalesCsv(const Instance& instance, const std::vector<double>& sales,
                   const fs::path& path) {
  CsvTable t{{"product", "sales"}, {}};
  for (std::size_t j = 0; j < sales.size(); ++j) {
    t.rows.push_back({instance.product_id(static_cast<int>(j)), FormatDouble(sales[j])});
  }
  WriteCsv(path, t);
}

fs::path WritePolicyCsv(const Instance& instance, const Policy& policy, const fs::path& dir) {
  fs::create_directories(dir);
  switch (policy.kind()) {
    case PolicyKind::kPb: {
      CsvTable t{{"product", "limit"}, {}};
      for (std::size_t j = 0; j < policy.limits().size(); ++j) {
        t.rows.push_back({instance.product_id(static_cast<int>(j)),
                          std::to_string(policy.limits()[j])});
      }
      WriteCsv(dir / "limits.csv", t);
      return dir / "limits.csv";
    }
    case PolicyKind::kOp: {
      CsvTable t{{"offer", "start", "end"}, {}};
      for (const OfferPeriod& p : policy.periods()) {
        t.rows.push_back({OfferIds(instance, p.offer), FormatDouble(p.start), FormatDouble(p.end)});
      }
      WriteCsv(dir / "periods.csv", t);
      return dir / "periods.csv";
    }
    case PolicyKind::kPc:
      WriteClosingsCsv(instance, policy.closing(), dir / "closings.csv");
      return dir / "closings.csv";
    default:
      return {};
  }
}

}  // namespace pcnrm
