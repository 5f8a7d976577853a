#pragma once

// Serialization: uncertain logs as native JSON or XES (uncertainty carried by
// meta-attributes next to standard fallback values), system nets as JSON, and
// alignments / bounds reports as JSON.

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"
#include "uconf/alignment.hpp"
#include "uconf/error.hpp"
#include "uconf/petri.hpp"
#include "uconf/uncertain.hpp"

namespace uconf {

inline constexpr std::string_view kLogSchemaVersion = "1.0";

namespace xes_keys {
inline constexpr std::string_view kName = "concept:name";
inline constexpr std::string_view kTimestamp = "time:timestamp";
inline constexpr std::string_view kEventId = "identity:id";
inline constexpr std::string_view kActivities = "uncertainty:activity";
inline constexpr std::string_view kTimeMin = "uncertainty:time:min";
inline constexpr std::string_view kTimeMax = "uncertainty:time:max";
inline constexpr std::string_view kIndeterminacy = "uncertainty:indeterminacy";
}  // namespace xes_keys

enum class LogFormat { json, xes };

inline LogFormat parse_log_format(std::string_view s) {
  if (s == "json") return LogFormat::json;
  if (s == "xes") return LogFormat::xes;
  throw DomainError("unknown log format '" + std::string(s) + "' (expected json or xes)");
}

struct LoadReport {
  std::size_t dropped_attributes = 0;
};

// ---------------------------------------------------------------------------
// Timestamps

/// ISO-8601 UTC with a "Z" suffix. Fractional seconds are written with nine digits
/// when nonzero and omitted otherwise.
inline std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  constexpr std::int64_t kNsPerSec = 1'000'000'000;
  std::int64_t secs = t.ns / kNsPerSec;
  std::int64_t frac = t.ns % kNsPerSec;
  if (frac < 0) {
    frac += kNsPerSec;
    --secs;
  }
  const sys_seconds tp{seconds{secs}};
  const auto day = floor<days>(tp);
  const year_month_day ymd{day};
  const hh_mm_ss hms{tp - day};
  std::ostringstream os;
  os << std::setfill('0') << std::setw(4) << static_cast<int>(ymd.year()) << '-' << std::setw(2)
     << static_cast<unsigned>(ymd.month()) << '-' << std::setw(2) << static_cast<unsigned>(ymd.day()) << 'T'
     << std::setw(2) << hms.hours().count() << ':' << std::setw(2) << hms.minutes().count() << ':' << std::setw(2)
     << hms.seconds().count();
  if (frac != 0) os << '.' << std::setw(9) << frac;
  os << 'Z';
  return os.str();
}

/// Accepts "YYYY-MM-DD[T| ]HH:MM:SS[.f{1,9}][Z|±HH:MM]"; no zone means UTC.
inline Timestamp parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  auto fail = [&]() -> ParseError { return ParseError("invalid timestamp '" + std::string(s) + "'"); };
  auto digits = [&](std::size_t pos, std::size_t n) {
    if (pos + n > s.size()) throw fail();
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
      if (s[i] < '0' || s[i] > '9') throw fail();
      v = v * 10 + (s[i] - '0');
    }
    return v;
  };
  auto expect = [&](std::size_t pos, std::string_view chars) {
    if (pos >= s.size() || chars.find(s[pos]) == std::string_view::npos) throw fail();
  };
  const int y = digits(0, 4);
  expect(4, "-");
  const int mo = digits(5, 2);
  expect(7, "-");
  const int d = digits(8, 2);
  expect(10, "T ");
  const int h = digits(11, 2);
  expect(13, ":");
  const int mi = digits(14, 2);
  expect(16, ":");
  const int se = digits(17, 2);
  std::size_t pos = 19;
  std::int64_t frac = 0;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::size_t n = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      if (n == 9) throw fail();
      frac = frac * 10 + (s[pos] - '0');
      ++pos;
      ++n;
    }
    if (n == 0) throw fail();
    for (; n < 9; ++n) frac *= 10;
  }
  std::int64_t offset_s = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      const int sign = s[pos] == '-' ? -1 : 1;
      const int oh = digits(pos + 1, 2);
      expect(pos + 3, ":");
      const int om = digits(pos + 4, 2);
      offset_s = sign * (oh * 3600 + om * 60);
      pos += 6;
    }
  }
  if (pos != s.size()) throw fail();
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 60) throw fail();
  const std::int64_t secs =
      sys_days{ymd}.time_since_epoch().count() * 86'400LL + h * 3600 + mi * 60 + se - offset_s;
  return Timestamp{secs * 1'000'000'000LL + frac};
}

// ---------------------------------------------------------------------------
// Native JSON log

inline nlohmann::json log_to_json(const UncertainLog& log) {
  nlohmann::json traces = nlohmann::json::array();
  for (const auto& trace : log.traces) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : trace.events) {
      events.push_back({{"id", e.id},
                        {"activities", e.activities},
                        {"t_min", format_timestamp(e.t_min)},
                        {"t_max", format_timestamp(e.t_max)},
                        {"indeterminate", e.indeterminate()}});
    }
    traces.push_back({{"case_id", trace.case_id}, {"events", std::move(events)}});
  }
  return {{"schema_version", kLogSchemaVersion}, {"traces", std::move(traces)}};
}

inline UncertainLog log_from_json(const nlohmann::json& doc, LoadReport* report = nullptr) {
  static const std::set<std::string> kEventKeys{"id", "activities", "t_min", "t_max", "indeterminate"};
  static const std::set<std::string> kTraceKeys{"case_id", "events"};
  LoadReport local;
  auto& rep = report ? *report : local;
  UncertainLog log;
  try {
    if (!doc.is_object() || !doc.contains("traces")) throw ParseError("log document must be an object with 'traces'");
    for (const auto& jt : doc.at("traces")) {
      UncertainTrace trace;
      trace.case_id = jt.at("case_id").get<std::string>();
      for (auto it = jt.begin(); it != jt.end(); ++it)
        if (!kTraceKeys.contains(it.key())) ++rep.dropped_attributes;
      for (const auto& je : jt.at("events")) {
        UncertainEvent e;
        e.id = je.at("id").get<std::string>();
        for (const auto& a : je.at("activities")) e.activities.insert(a.get<std::string>());
        e.t_min = parse_timestamp(je.at("t_min").get<std::string>());
        e.t_max = parse_timestamp(je.at("t_max").get<std::string>());
        e.indeterminacy = je.value("indeterminate", false) ? Indeterminacy::indeterminate : Indeterminacy::determinate;
        for (auto it = je.begin(); it != je.end(); ++it)
          if (!kEventKeys.contains(it.key())) ++rep.dropped_attributes;
        validate(e);
        trace.events.push_back(std::move(e));
      }
      log.traces.push_back(std::move(trace));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed log document: ") + e.what());
  }
  validate(log);
  return log;
}

// ---------------------------------------------------------------------------
// XES

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline void xes_attr(std::ostream& os, std::string_view indent, std::string_view type, std::string_view key,
                     std::string_view value) {
  os << indent << '<' << type << " key=\"" << xml_escape(key) << "\" value=\"" << xml_escape(value) << "\"/>\n";
}

}  // namespace detail

/// XES document. Every event carries concept:name (lexicographically least activity),
/// time:timestamp (t_min) and identity:id; uncertainty attributes are written only
/// where the event is uncertain in that dimension.
inline std::string log_to_xes(const UncertainLog& log) {
  using namespace xes_keys;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<log xes.version=\"1849-2016\" xmlns=\"http://www.xes-standard.org/\">\n";
  os << "  <extension name=\"Concept\" prefix=\"concept\" uri=\"http://www.xes-standard.org/concept.xesext\"/>\n";
  os << "  <extension name=\"Time\" prefix=\"time\" uri=\"http://www.xes-standard.org/time.xesext\"/>\n";
  os << "  <extension name=\"Identity\" prefix=\"identity\" uri=\"http://www.xes-standard.org/identity.xesext\"/>\n";
  for (const auto& trace : log.traces) {
    os << "  <trace>\n";
    detail::xes_attr(os, "    ", "string", kName, trace.case_id);
    for (const auto& e : trace.events) {
      os << "    <event>\n";
      detail::xes_attr(os, "      ", "string", kEventId, e.id);
      detail::xes_attr(os, "      ", "string", kName, *e.activities.begin());
      detail::xes_attr(os, "      ", "date", kTimestamp, format_timestamp(e.t_min));
      if (e.activities.size() > 1) {
        os << "      <list key=\"" << kActivities << "\">\n";
        for (const auto& a : e.activities) detail::xes_attr(os, "        ", "string", kName, a);
        os << "      </list>\n";
      }
      if (e.t_min != e.t_max) {
        detail::xes_attr(os, "      ", "date", kTimeMin, format_timestamp(e.t_min));
        detail::xes_attr(os, "      ", "date", kTimeMax, format_timestamp(e.t_max));
      }
      if (e.indeterminate()) detail::xes_attr(os, "      ", "boolean", kIndeterminacy, "true");
      os << "    </event>\n";
    }
    os << "  </trace>\n";
  }
  os << "</log>\n";
  return os.str();
}

inline UncertainLog log_from_xes(std::istream& in, LoadReport* report = nullptr) {
  namespace pt = boost::property_tree;
  using namespace xes_keys;
  LoadReport local;
  auto& rep = report ? *report : local;
  pt::ptree doc;
  try {
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("malformed XES (line " + std::to_string(e.line()) + "): " + e.message());
  }
  auto root = doc.get_child_optional("log");
  if (!root) throw ParseError("XES document has no <log> element");

  auto attr = [](const pt::ptree& node, const char* name) {
    return node.get<std::string>(std::string("<xmlattr>.") + name, "");
  };
  static const std::set<std::string> kAttributeTypes{"string", "date", "int", "float", "boolean", "id", "list"};

  UncertainLog log;
  std::size_t trace_no = 0;
  for (const auto& [tag, tnode] : *root) {
    if (tag != "trace") continue;
    ++trace_no;
    UncertainTrace trace;
    std::vector<const pt::ptree*> event_nodes;
    for (const auto& [ctag, child] : tnode) {
      if (ctag == "event") {
        event_nodes.push_back(&child);
      } else if (kAttributeTypes.contains(ctag)) {
        if (attr(child, "key") == kName) trace.case_id = attr(child, "value");
        else ++rep.dropped_attributes;
      }
    }
    if (trace.case_id.empty()) trace.case_id = "trace-" + std::to_string(trace_no);

    std::size_t event_no = 0;
    for (const auto* enode : event_nodes) {
      ++event_no;
      UncertainEvent e;
      std::optional<Label> name;
      std::optional<Timestamp> stamp, tmin, tmax;
      std::set<Label> listed;
      bool has_list = false;
      bool indeterminate = false;
      const std::string where = "trace '" + trace.case_id + "' event #" + std::to_string(event_no);
      try {
        for (const auto& [etag, a] : *enode) {
          if (etag == "<xmlattr>" || etag == "<xmlcomment>") continue;
          const auto key = attr(a, "key");
          if (etag == "list" && key == kActivities) {
            has_list = true;
            const pt::ptree* values = &a;
            if (auto v = a.get_child_optional("values")) values = &*v;
            for (const auto& [vtag, v] : *values)
              if (vtag == "string") listed.insert(attr(v, "value"));
          } else if (key == kEventId) {
            e.id = attr(a, "value");
          } else if (key == kName) {
            name = attr(a, "value");
          } else if (key == kTimestamp) {
            stamp = parse_timestamp(attr(a, "value"));
          } else if (key == kTimeMin) {
            tmin = parse_timestamp(attr(a, "value"));
          } else if (key == kTimeMax) {
            tmax = parse_timestamp(attr(a, "value"));
          } else if (key == kIndeterminacy) {
            indeterminate = attr(a, "value") == "true";
          } else {
            ++rep.dropped_attributes;
          }
        }
      } catch (const ParseError& err) {
        throw ParseError(where + ": " + err.what());
      }
      if (e.id.empty()) e.id = trace.case_id + ":" + std::to_string(event_no);
      if (has_list) e.activities = std::move(listed);
      else if (name) e.activities = {*name};
      if (!stamp && !tmin) throw ValidationError("event '" + e.id + "' (" + where + ") has no timestamp");
      e.t_min = tmin ? *tmin : *stamp;
      e.t_max = tmax ? *tmax : e.t_min;
      e.indeterminacy = indeterminate ? Indeterminacy::indeterminate : Indeterminacy::determinate;
      validate(e);
      trace.events.push_back(std::move(e));
    }
    log.traces.push_back(std::move(trace));
  }
  validate(log);
  return log;
}

// ---------------------------------------------------------------------------
// Entry points

inline UncertainLog load_log(std::istream& in, LogFormat format, LoadReport* report = nullptr) {
  if (format == LogFormat::xes) return log_from_xes(in, report);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON log: ") + e.what());
  }
  return log_from_json(doc, report);
}

inline UncertainLog load_log_string(std::string_view text, LogFormat format, LoadReport* report = nullptr) {
  std::istringstream in{std::string(text)};
  return load_log(in, format, report);
}

inline UncertainLog load_log_file(const std::string& path, LogFormat format, LoadReport* report = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open log file '" + path + "'");
  return load_log(in, format, report);
}

inline std::string save_log(const UncertainLog& log, LogFormat format) {
  if (format == LogFormat::xes) return log_to_xes(log);
  return log_to_json(log).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Nets

inline nlohmann::json net_to_json(const SystemNet& sn) {
  const auto& net = sn.net;
  nlohmann::json transitions = nlohmann::json::array();
  nlohmann::json arcs = nlohmann::json::array();
  for (const auto& t : net.transitions()) {
    transitions.push_back({{"id", t.id}, {"label", t.label ? nlohmann::json(*t.label) : nlohmann::json(nullptr)}});
    for (auto p : t.preset) arcs.push_back({net.place(p), t.id});
    for (auto p : t.postset) arcs.push_back({t.id, net.place(p)});
  }
  auto marking = [&](const Marking& m) {
    nlohmann::json out = nlohmann::json::object();
    for (std::size_t p = 0; p < m.size(); ++p)
      if (m[p] > 0) out[net.place(p)] = m[p];
    return out;
  };
  return {{"places", net.places()},
          {"transitions", std::move(transitions)},
          {"arcs", std::move(arcs)},
          {"initial_marking", marking(sn.initial_marking)},
          {"final_marking", marking(sn.final_marking)}};
}

inline SystemNet net_from_json(const nlohmann::json& doc) {
  SystemNet sn;
  try {
    for (const auto& p : doc.at("places")) sn.net.add_place(p.get<std::string>());
    for (const auto& t : doc.at("transitions")) {
      const auto& label = t.at("label");
      sn.net.add_transition(t.at("id").get<std::string>(),
                            label.is_null() ? std::nullopt : std::optional<Label>(label.get<std::string>()));
    }
    for (const auto& a : doc.at("arcs")) {
      if (!a.is_array() || a.size() != 2) throw ValidationError("arc must be a [from, to] pair");
      sn.net.add_arc(a[0].get<std::string>(), a[1].get<std::string>());
    }
    auto marking = [&](const char* key) {
      Marking m(sn.net.place_count());
      for (const auto& [place, count] : doc.at(key).items()) {
        auto p = sn.net.find_place(place);
        if (!p) throw ValidationError(std::string(key) + " marks unknown place '" + place + "'");
        const auto c = count.get<std::int64_t>();
        if (c < 0) throw ValidationError(std::string(key) + " has a negative count on '" + place + "'");
        m[*p] = static_cast<std::uint32_t>(c);
      }
      return m;
    };
    sn.initial_marking = marking("initial_marking");
    sn.final_marking = marking("final_marking");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed net document: ") + e.what());
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  try {
    validate(sn);
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  return sn;
}

inline SystemNet load_net(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON net: ") + e.what());
  }
  return net_from_json(doc);
}

inline SystemNet load_net_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open net file '" + path + "'");
  return load_net(in);
}

inline std::string save_net(const SystemNet& sn) { return net_to_json(sn).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Alignments and reports

inline nlohmann::json alignment_to_json(const Alignment& a) {
  nlohmann::json moves = nlohmann::json::array();
  const std::string skip(kSkipSymbol), tau(kTauSymbol);
  for (const auto& m : a.moves) {
    nlohmann::json j;
    j["log"] = !m.log ? skip : m.log->label ? *m.log->label : tau;
    j["model_label"] = !m.model ? skip : m.model->label ? *m.model->label : tau;
    j["model_transition"] = m.model ? nlohmann::json(m.model->transition) : nlohmann::json(nullptr);
    moves.push_back(std::move(j));
  }
  return {{"cost", a.cost}, {"moves", std::move(moves)}};
}

inline nlohmann::json bounds_to_json(const LogBounds& bounds) {
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& r : bounds.reports) {
    nlohmann::json j{{"case_id", r.case_id}};
    if (r.ok()) {
      j["lower_cost"] = r.lower_cost;
      j["upper_cost"] = r.upper_cost;
      j["lower_witness"] = alignment_to_json(r.lower_witness);
      j["upper_witness"] = alignment_to_json(r.upper_witness);
    } else {
      j["error"] = *r.error;
    }
    j["realization_count"] = r.realization_count ? nlohmann::json(*r.realization_count) : nlohmann::json("capped");
    reports.push_back(std::move(j));
  }
  return {{"reports", std::move(reports)}, {"total_lower", bounds.total_lower}, {"total_upper", bounds.total_upper}};
}

}  // namespace uconf
