#include "randcomp/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "randcomp/error.hpp"

namespace randcomp::io {

using nlohmann::json;

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

FinitePMF pmf_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw StructureError(what + ": expected an array of probabilities");
  std::vector<double> p;
  p.reserve(j.size());
  for (const json& v : j) {
    if (!v.is_number()) throw StructureError(what + ": non-numeric probability");
    p.push_back(v.get<double>());
  }
  return FinitePMF(std::move(p));
}

std::vector<std::vector<FinitePMF>> table_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw StructureError(what + ": expected [input][tuple][output] nesting");
  std::vector<std::vector<FinitePMF>> rows;
  for (std::size_t x = 0; x < j.size(); ++x) {
    if (!j[x].is_array()) throw StructureError(what + ": expected [input][tuple][output] nesting");
    auto& row = rows.emplace_back();
    for (const json& cell : j[x]) row.push_back(pmf_from_json(cell, what));
  }
  return rows;
}

json table_to_json(std::span<const double> dense, std::size_t outer, std::size_t inner,
                   std::size_t width) {
  json out = json::array();
  for (std::size_t i = 0; i < outer; ++i) {
    json row = json::array();
    for (std::size_t t = 0; t < inner; ++t) {
      const double* p = dense.data() + (i * inner + t) * width;
      row.push_back(json(std::vector<double>(p, p + width)));
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::size_t positive_size(const json& obj, const char* key, const std::string& what) {
  if (!obj.contains(key) || !obj[key].is_number_integer() || obj[key].get<long long>() < 1) {
    throw StructureError(what + ": '" + key + "' must be a positive integer");
  }
  return obj[key].get<std::size_t>();
}

std::vector<SourceSpec> sources_from_json(const json& j) {
  if (!j.is_array()) throw StructureError("'sources' must be an array");
  std::vector<SourceSpec> sources;
  for (const json& s : j) {
    if (!s.contains("id") || !s["id"].is_string()) throw StructureError("source without id");
    SourceSpec spec;
    spec.id = s["id"].get<std::string>();
    if (!s.contains("pmf")) throw StructureError("source '" + spec.id + "' has no pmf");
    spec.pmf = pmf_from_json(s["pmf"], "source '" + spec.id + "'");
    sources.push_back(std::move(spec));
  }
  return sources;
}

}  // namespace

NetworkSpec network_from_json(const json& doc) {
  if (!doc.is_object()) throw StructureError("network spec must be a JSON object");
  if (doc.contains("blackbox")) {
    const json& b = doc["blackbox"];
    BlackboxNetwork net;
    net.input_size = positive_size(b, "inputs", "blackbox");
    net.output_size = positive_size(b, "outputs", "blackbox");
    net.sources = sources_from_json(b.value("sources", json::array()));
    if (!b.contains("kernel")) throw StructureError("blackbox has no kernel");
    net.kernel = table_from_json(b["kernel"], "kernel");
    return net;
  }
  if (!doc.contains("parties")) throw StructureError("spec needs 'parties' or 'blackbox'");

  StructuredNetwork net;
  net.sources = sources_from_json(doc.value("sources", json::array()));
  const json& parties = doc["parties"];
  if (!parties.is_array()) throw StructureError("'parties' must be an array");
  for (std::size_t p = 0; p < parties.size(); ++p) {
    const json& pj = parties[p];
    PartySpec party;
    party.name = pj.value("name", "P" + std::to_string(p));
    party.input_size = positive_size(pj, "inputs", party.name);
    party.output_size = positive_size(pj, "outputs", party.name);
    for (const json& sid : pj.value("sees", json::array())) {
      if (!sid.is_string()) throw StructureError(party.name + ": 'sees' entries must be ids");
      const std::string id = sid.get<std::string>();
      auto it = std::find_if(net.sources.begin(), net.sources.end(),
                             [&](const SourceSpec& s) { return s.id == id; });
      if (it == net.sources.end()) {
        throw StructureError(party.name + " sees unknown source '" + id + "'");
      }
      it->visible_to.push_back(p);
    }
    if (!pj.contains("strategy")) throw StructureError(party.name + " has no strategy");
    party.strategy = table_from_json(pj["strategy"], "strategy of " + party.name);
    net.parties.push_back(std::move(party));
  }
  return net;
}

json network_to_json(const ValidatedNetwork& net) {
  const auto sources = net.sources();
  json srcs = json::array();
  for (const SourceSpec& s : sources) srcs.push_back({{"id", s.id}, {"pmf", s.pmf.probs}});

  if (net.is_blackbox()) {
    json b;
    b["inputs"] = net.joint_inputs();
    b["outputs"] = net.joint_outputs();
    b["sources"] = std::move(srcs);
    b["kernel"] = table_to_json(net.kernel(), net.joint_inputs(),
                                static_cast<std::size_t>(net.source_tuples()), net.joint_outputs());
    return json{{"blackbox", std::move(b)}};
  }

  json parties = json::array();
  for (const auto& party : net.parties()) {
    json sees = json::array();
    for (std::size_t s : party.visible) sees.push_back(sources[s].id);
    json pj;
    pj["name"] = party.name;
    pj["inputs"] = party.inputs;
    pj["outputs"] = party.outputs;
    pj["sees"] = std::move(sees);
    pj["strategy"] = table_to_json(party.strategy, party.inputs, party.visible_tuples, party.outputs);
    parties.push_back(std::move(pj));
  }
  return json{{"parties", std::move(parties)}, {"sources", std::move(srcs)}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw StructureError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

ValidatedNetwork read_network_file(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  try {
    return validate_network(network_from_json(doc));
  } catch (const json::exception& e) {
    throw StructureError(path.string() + ": " + e.what());
  }
}

void write_network_file(const std::filesystem::path& path, const ValidatedNetwork& net) {
  write_json_file(path, network_to_json(net));
}

void write_distribution_csv(std::ostream& out, const ConditionalDistribution& dist) {
  out << "x,a,p\n";
  for (std::size_t x = 0; x < dist.inputs(); ++x) {
    for (std::size_t a = 0; a < dist.outputs(); ++a) {
      out << x << ',' << a << ',' << format_real(dist.at(x, a)) << '\n';
    }
  }
}

void write_distribution_csv(const std::filesystem::path& path, const ConditionalDistribution& dist) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  write_distribution_csv(out, dist);
}

ConditionalDistribution read_distribution_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,a,p", 0) != 0) {
    throw StructureError("distribution CSV must start with header x,a,p");
  }
  struct Cell {
    std::size_t x, a;
    double p;
  };
  std::vector<Cell> cells;
  std::size_t inputs = 0, outputs = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream fields(line);
    Cell c{};
    char comma1 = 0, comma2 = 0;
    if (!(fields >> c.x >> comma1 >> c.a >> comma2 >> c.p) || comma1 != ',' || comma2 != ',') {
      throw StructureError("malformed CSV row: " + line);
    }
    inputs = std::max(inputs, c.x + 1);
    outputs = std::max(outputs, c.a + 1);
    cells.push_back(c);
  }
  if (cells.size() != inputs * outputs) {
    throw StructureError("distribution CSV does not cover every (x, a) cell exactly once");
  }
  ConditionalDistribution dist(inputs, outputs);
  std::vector<bool> seen(inputs * outputs, false);
  for (const Cell& c : cells) {
    if (seen[c.x * outputs + c.a]) throw StructureError("duplicate CSV cell");
    seen[c.x * outputs + c.a] = true;
    dist.at(c.x, c.a) = c.p;
  }
  return dist;
}

ConditionalDistribution read_distribution_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return read_distribution_csv(in);
}

}  // namespace randcomp::io
