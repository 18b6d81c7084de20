#include "bhs/trace.hpp"

#include <json.hpp>

namespace bhs {

using json = nlohmann::ordered_json;

void JsonlStreamSink::on_header(const TraceHeader& h) {
  json j;
  j["format_version"] = "1";
  j["footprint_hash"] = h.footprint_hash;
  j["algorithm"] = h.algorithm;
  j["adversary"] = h.adversary;
  j["seed"] = h.seed;
  j["agents"] = h.agents;
  out_ << j.dump() << '\n';
}

void JsonlStreamSink::on_event(const TraceEvent& e) {
  json j;
  j["round"] = e.round;
  switch (e.kind) {
    case TraceEvent::Kind::RemovalSet: {
      j["kind"] = "removal-set";
      auto arr = json::array();
      for (auto [u, v] : e.removed) arr.push_back({u, v});
      j["removed"] = arr;
      break;
    }
    case TraceEvent::Kind::Write:
      j["kind"] = "write";
      j["agent"] = e.agent;
      j["node"] = e.node;
      j["key"] = e.key;
      j["parent"] = e.parent;
      j["label"] = e.label;
      break;
    case TraceEvent::Kind::MoveOk:
      j["kind"] = "move-ok";
      j["agent"] = e.agent;
      j["from"] = e.node;
      j["to"] = e.to;
      j["port"] = e.port;
      j["pin"] = e.pin;
      break;
    case TraceEvent::Kind::MoveFail:
      j["kind"] = "move-fail";
      j["agent"] = e.agent;
      j["node"] = e.node;
      j["port"] = e.port;
      break;
    case TraceEvent::Kind::Death:
      j["kind"] = "death";
      j["agent"] = e.agent;
      j["node"] = e.node;
      break;
    case TraceEvent::Kind::Detection:
      j["kind"] = "detection";
      j["agent"] = e.agent;
      j["node"] = e.node;
      j["port"] = e.port;
      j["group"] = e.group;
      break;
    case TraceEvent::Kind::Termination:
      j["kind"] = "termination";
      j["agent"] = e.agent;
      break;
  }
  out_ << j.dump() << '\n';
}

void JsonlStreamSink::on_outcome(const Outcome& o) {
  json j;
  j["kind"] = "outcome";
  j["outcome"] = to_string(o.kind);
  j["rounds"] = o.rounds;
  j["deaths"] = o.deaths;
  j["detected_node"] = o.detected_node;
  j["detected_port"] = o.detected_port;
  j["survivor"] = o.survivor;
  out_ << j.dump() << '\n';
}

std::string summary_json(const Outcome& o, const std::string& footprint_hash,
                         uint64_t seed) {
  json j;
  j["outcome"] = to_string(o.kind);
  j["rounds"] = o.rounds;
  j["deaths"] = o.deaths;
  j["detected_node"] = o.detected_node;
  j["detected_port"] = o.detected_port;
  j["survivor"] = o.survivor;
  j["footprint_hash"] = footprint_hash;
  j["seed"] = seed;
  return j.dump();
}

} // namespace bhs
