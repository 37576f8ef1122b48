#include "honeyttl/fingerprint_db.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "text_util.hpp"

namespace honeyttl {

std::string_view to_string(FingerprintKind kind) {
  return kind == FingerprintKind::Device ? "device" : "os";
}

FingerprintSet::FingerprintSet(std::vector<Fingerprint> entries, std::string provenance)
    : entries_(std::move(entries)), provenance_(std::move(provenance)) {
  if (entries_.empty())
    throw FingerprintError("fingerprint set is empty");

  std::set<std::pair<std::string, int>> seen;
  bool has_device = false;
  bool has_os = false;
  for (const auto &f : entries_) {
    if (f.label.empty())
      throw FingerprintError("fingerprint label is empty");
    if (f.ttl < 1 || f.ttl > 255)
      throw FingerprintError("ttl " + std::to_string(f.ttl) + " out of range [1, 255] for '" +
                             f.label + "'");
    if (!seen.emplace(f.label, f.ttl).second)
      throw FingerprintError("duplicate fingerprint (" + f.label + ", " + std::to_string(f.ttl) +
                             ")");
    has_device |= f.kind == FingerprintKind::Device;
    has_os |= f.kind == FingerprintKind::OperatingSystem;
  }
  if (!has_device)
    throw FingerprintError("no device entries");
  if (!has_os)
    throw FingerprintError("no operating system entries");
}

FingerprintSet builtin_set() {
  using K = FingerprintKind;
  return FingerprintSet(
      {
          {"6ES7 151-8AB00-0AB0", K::Device, 30, "ET200S"},
          {"6ES7 322-1BH01-0AA0", K::Device, 60, "S7-300"},
          {"6ES7 212-1BE40-0XB0", K::Device, 30, "S7-1200"},
          {"6ES7 214-1AG40-0XB0", K::Device, 30, "S7-1200"},
          {"6ES7 215-1AG40-0XB0", K::Device, 30, "S7-1200"},
          {"6ES7 522-1BL10-0AA0", K::Device, 255, "S7-1500"},
          {"Linux", K::OperatingSystem, 64, std::nullopt},
          {"Windows", K::OperatingSystem, 128, std::nullopt},
      },
      "builtin");
}

FingerprintSet load_fingerprints(std::istream &in, std::string provenance) {
  std::vector<Fingerprint> entries;
  std::set<std::pair<std::string, int>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = detail::trim(line);
    if (text.empty() || text.front() == '#')
      continue;

    auto fields = detail::split(text, ',');
    if (fields.size() < 3 || fields.size() > 4)
      throw FingerprintError("line " + std::to_string(line_no) +
                                 ": expected kind,label,ttl[,range]",
                             line_no);
    for (auto &f : fields)
      f = std::string(detail::trim(f));

    Fingerprint fp;
    auto kind = detail::lower(fields[0]);
    if (kind == "device")
      fp.kind = FingerprintKind::Device;
    else if (kind == "os")
      fp.kind = FingerprintKind::OperatingSystem;
    else
      throw FingerprintError("line " + std::to_string(line_no) + ": unknown kind '" + fields[0] +
                                 "'",
                             line_no);

    fp.label = fields[1];
    if (fp.label.empty())
      throw FingerprintError("line " + std::to_string(line_no) + ": empty label", line_no);

    int ttl = 0;
    const auto &ttl_text = fields[2];
    auto [ptr, ec] = std::from_chars(ttl_text.data(), ttl_text.data() + ttl_text.size(), ttl);
    if (ec != std::errc() || ptr != ttl_text.data() + ttl_text.size())
      throw FingerprintError("line " + std::to_string(line_no) + ": ttl '" + ttl_text +
                                 "' is not an integer",
                             line_no);
    if (ttl < 1 || ttl > 255)
      throw FingerprintError("line " + std::to_string(line_no) + ": ttl " + std::to_string(ttl) +
                                 " out of range [1, 255]",
                             line_no);
    fp.ttl = ttl;

    if (fields.size() == 4 && !fields[3].empty())
      fp.range = fields[3];

    if (!seen.emplace(fp.label, fp.ttl).second)
      throw FingerprintError("line " + std::to_string(line_no) + ": duplicate (" + fp.label +
                                 ", " + std::to_string(fp.ttl) + ")",
                             line_no);
    entries.push_back(std::move(fp));
  }
  return FingerprintSet(std::move(entries), std::move(provenance));
}

FingerprintSet load_fingerprints_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw FingerprintError("cannot open fingerprint file " + path.string());
  return load_fingerprints(in, path.string());
}

std::string serialize_fingerprints(const FingerprintSet &set) {
  std::ostringstream out;
  out << "# kind,label,ttl[,range]\n";
  for (const auto &f : set.entries()) {
    out << to_string(f.kind) << ',' << f.label << ',' << f.ttl;
    if (f.range)
      out << ',' << *f.range;
    out << '\n';
  }
  return out.str();
}

MatchResult nearest_match(int reconstructed, const FingerprintSet &set) {
  MatchResult result;
  result.distance = -1;
  for (const auto &f : set.entries()) {
    int d = std::abs(reconstructed - f.ttl);
    if (result.distance < 0 || d < result.distance) {
      result.distance = d;
      result.best.clear();
    }
    if (d == result.distance)
      result.best.push_back(f);
  }
  std::sort(result.best.begin(), result.best.end(), [](const auto &a, const auto &b) {
    return std::tie(a.kind, a.ttl, a.label, a.range) < std::tie(b.kind, b.ttl, b.label, b.range);
  });
  bool any_device = false;
  bool any_os = false;
  for (const auto &f : result.best) {
    any_device |= f.kind == FingerprintKind::Device;
    any_os |= f.kind == FingerprintKind::OperatingSystem;
  }
  result.tied_across_kinds = any_device && any_os;
  return result;
}

} // namespace honeyttl
