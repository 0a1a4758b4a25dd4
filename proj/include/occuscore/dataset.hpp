#ifndef OCCUSCORE_DATASET_HPP
#define OCCUSCORE_DATASET_HPP

// Dataset file loading for the CLI. Two CSV layouts are accepted:
//   summary:    region,N,K,s_d,d        (one row per region)
//   site-level: region,site,K,y         (one row per site, aggregated)
// plus the JSON layout emitted by the analysis report. Exactly two
// regions, labelled 1 and 2, must be present.

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "occuscore/model.hpp"

namespace occuscore {

struct Dataset {
  TwoRegionDesign designs{};
  TwoRegionData data{};
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

Dataset parse_dataset_csv(std::istream& in);
Dataset parse_dataset_json(const std::string& text);

// Dispatches on a leading '{' to the JSON parser.
Dataset load_dataset(const std::string& path);

}  // namespace occuscore

#endif
