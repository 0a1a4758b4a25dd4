#include "occuscore/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace occuscore {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return fields;
}

bool is_number(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

int parse_int(const std::string& s, int line_no, const char* what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse " + what + " from '" +
                     s + "'");
  }
}

Dataset assemble(const std::map<int, RegionDesign>& designs,
                 const std::map<int, RegionSummary>& summaries) {
  if (designs.size() != 2 || !designs.count(1) || !designs.count(2))
    throw ParseError("dataset must contain exactly regions 1 and 2");
  Dataset out;
  out.designs = {designs.at(1), designs.at(2)};
  out.data = {summaries.at(1), summaries.at(2)};
  validate(out.data.region1, out.designs.region1);
  validate(out.data.region2, out.designs.region2);
  return out;
}

}  // namespace

Dataset parse_dataset_csv(std::istream& in) {
  std::map<int, RegionDesign> designs;
  std::map<int, RegionSummary> summaries;
  std::map<int, int> site_counts;
  int n_columns = 0;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_fields(line);
    if (std::all_of(fields.begin(), fields.end(), [](const std::string& f) { return f.empty(); }))
      continue;
    if (!is_number(fields[0])) {
      if (line_no == 1) continue;  // header row
      throw ParseError("line " + std::to_string(line_no) + ": unexpected non-numeric row");
    }
    if (n_columns == 0) {
      n_columns = static_cast<int>(fields.size());
      if (n_columns != 4 && n_columns != 5)
        throw ParseError("line " + std::to_string(line_no) +
                         ": expected 5 columns (region,N,K,s_d,d) or 4 (region,site,K,y)");
    }
    if (static_cast<int>(fields.size()) != n_columns)
      throw ParseError("line " + std::to_string(line_no) + ": inconsistent column count");

    const int region = parse_int(fields[0], line_no, "region");
    if (region != 1 && region != 2)
      throw ParseError("line " + std::to_string(line_no) + ": region must be 1 or 2");

    if (n_columns == 5) {
      if (summaries.count(region))
        throw ParseError("line " + std::to_string(line_no) + ": duplicate summary row for region " +
                         std::to_string(region));
      designs[region] = {parse_int(fields[1], line_no, "N"), parse_int(fields[2], line_no, "K")};
      summaries[region] = {parse_int(fields[3], line_no, "s_d"),
                           parse_int(fields[4], line_no, "d")};
    } else {
      const int k = parse_int(fields[2], line_no, "K");
      const int y = parse_int(fields[3], line_no, "y");
      if (designs.count(region) && designs[region].n_visits != k)
        throw ParseError("line " + std::to_string(line_no) +
                         ": inconsistent K within region " + std::to_string(region));
      designs[region].n_visits = k;
      ++site_counts[region];
      if (y < 0 || y > k)
        throw ParseError("line " + std::to_string(line_no) + ": y out of [0, K]");
      if (y > 0) {
        ++summaries[region].s_d;
        summaries[region].d += y;
      } else {
        summaries[region];  // region present even if no detections
      }
    }
  }
  if (n_columns == 4)
    for (auto& [region, design] : designs) design.n_sites = site_counts[region];

  try {
    return assemble(designs, summaries);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

Dataset parse_dataset_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("JSON parse failure: ") + e.what());
  }
  if (j.contains("dataset")) j = j.at("dataset");  // accept a full analysis report
  std::map<int, RegionDesign> designs;
  std::map<int, RegionSummary> summaries;
  try {
    for (const auto& region : j.at("regions")) {
      const int label = region.at("region").get<int>();
      designs[label] = {region.at("n_sites").get<int>(), region.at("n_visits").get<int>()};
      summaries[label] = {region.at("s_d").get<int>(), region.at("d").get<int>()};
    }
    return assemble(designs, summaries);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("JSON dataset layout: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open dataset file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_dataset_json(text);
  std::istringstream ss(text);
  return parse_dataset_csv(ss);
}

}  // namespace occuscore
