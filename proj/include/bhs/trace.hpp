#pragma once

#include <ostream>
#include <string>

#include "bhs/engine.hpp"

namespace bhs {

// One JSON object per line: header, events, outcome. Keys appear in a fixed
// insertion order, so identical runs produce identical bytes.
class JsonlStreamSink : public TraceSink {
 public:
  explicit JsonlStreamSink(std::ostream& out) : out_(out) {}
  void on_header(const TraceHeader& h) override;
  void on_event(const TraceEvent& e) override;
  void on_outcome(const Outcome& o) override;

 private:
  std::ostream& out_;
};

std::string summary_json(const Outcome& o, const std::string& footprint_hash,
                         uint64_t seed);

} // namespace bhs
