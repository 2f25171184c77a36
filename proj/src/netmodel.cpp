#include "randcomp/netmodel.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "randcomp/error.hpp"
#include "randcomp/kernels.hpp"
#include "randcomp/mixed_radix.hpp"

namespace randcomp {

// ---------------------------------------------------------------------------
// FinitePMF / ConditionalDistribution

FinitePMF FinitePMF::uniform(std::size_t k) {
  if (k == 0) throw InvalidArgument("uniform PMF over an empty alphabet");
  return FinitePMF(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

FinitePMF FinitePMF::point_mass(std::size_t k, std::size_t at) {
  if (at >= k) throw InvalidArgument("point mass outside the alphabet");
  std::vector<double> p(k, 0.0);
  p[at] = 1.0;
  return FinitePMF(std::move(p));
}

std::size_t FinitePMF::support_size() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(probs.begin(), probs.end(), [](double w) { return w > 0.0; }));
}

void FinitePMF::check(const std::string& what, double tol) const {
  if (probs.empty()) throw NormalizationError(what + ": empty PMF");
  double total = 0.0;
  for (double w : probs) {
    if (!std::isfinite(w) || w < 0.0) {
      throw NormalizationError(what + ": negative or non-finite weight");
    }
    total += w;
  }
  if (std::fabs(total - 1.0) > tol) {
    std::ostringstream msg;
    msg << what << ": weights sum to " << total;
    throw NormalizationError(msg.str());
  }
}

ConditionalDistribution::ConditionalDistribution(std::size_t inputs, std::size_t outputs)
    : inputs_(inputs), outputs_(outputs), table_(inputs * outputs, 0.0) {}

ConditionalDistribution::ConditionalDistribution(std::size_t inputs, std::size_t outputs,
                                                 std::vector<double> table)
    : inputs_(inputs), outputs_(outputs), table_(std::move(table)) {
  if (table_.size() != inputs_ * outputs_) {
    throw ShapeMismatch("conditional table size does not match inputs x outputs");
  }
}

void ConditionalDistribution::check_rows(double tol) const {
  for (std::size_t x = 0; x < inputs_; ++x) {
    double total = 0.0;
    for (double w : row(x)) {
      if (!std::isfinite(w) || w < -tol) {
        throw NormalizationError("row " + std::to_string(x) + ": negative weight");
      }
      total += w;
    }
    if (std::fabs(total - 1.0) > tol) {
      throw NormalizationError("row " + std::to_string(x) + " does not sum to 1");
    }
  }
}

// ---------------------------------------------------------------------------
// Validation

namespace {

std::size_t checked_product(std::size_t a, std::size_t b, const char* what) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    throw Overflow(std::string(what) + " overflows");
  }
  return a * b;
}

void sort_and_check_sources(std::vector<SourceSpec>& sources) {
  std::sort(sources.begin(), sources.end(),
            [](const SourceSpec& l, const SourceSpec& r) { return l.id < r.id; });
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i].id.empty()) throw StructureError("source with empty id");
    if (i > 0 && sources[i].id == sources[i - 1].id) {
      throw StructureError("duplicate source id '" + sources[i].id + "'");
    }
    sources[i].pmf.check("source '" + sources[i].id + "'");
  }
}

std::uint64_t tuple_count(const std::vector<SourceSpec>& sources) {
  std::uint64_t n = 1;
  for (const SourceSpec& s : sources) n = saturating_mul(n, s.pmf.size());
  return n;
}

// Flattens rows[i][j] (each of length `width`) into a dense buffer, checking
// shape and normalization on the way.
std::vector<double> flatten_rows(const std::vector<std::vector<FinitePMF>>& rows,
                                 std::size_t outer, std::size_t inner, std::size_t width,
                                 const std::string& what) {
  if (rows.size() != outer) {
    throw StructureError(what + ": expected " + std::to_string(outer) + " input rows, got " +
                         std::to_string(rows.size()));
  }
  std::vector<double> dense;
  dense.reserve(checked_product(checked_product(outer, inner, what.c_str()), width,
                                what.c_str()));
  for (std::size_t i = 0; i < outer; ++i) {
    if (rows[i].size() != inner) {
      throw StructureError(what + ": input " + std::to_string(i) + " covers " +
                           std::to_string(rows[i].size()) + " source tuples, expected " +
                           std::to_string(inner));
    }
    for (std::size_t j = 0; j < inner; ++j) {
      const FinitePMF& pmf = rows[i][j];
      const std::string where = what + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      if (pmf.size() != width) {
        throw StructureError(where + ": expected " + std::to_string(width) + " outputs");
      }
      pmf.check(where);
      dense.insert(dense.end(), pmf.probs.begin(), pmf.probs.end());
    }
  }
  return dense;
}

}  // namespace

std::span<const SourceSpec> ValidatedNetwork::sources() const noexcept {
  return std::visit([](const auto& n) { return std::span<const SourceSpec>(n.sources); },
                    spec_);
}

std::optional<std::size_t> ValidatedNetwork::source_index(const std::string& id) const {
  const auto srcs = sources();
  for (std::size_t i = 0; i < srcs.size(); ++i) {
    if (srcs[i].id == id) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> ValidatedNetwork::source_sizes() const {
  std::vector<std::size_t> sizes;
  for (const SourceSpec& s : sources()) sizes.push_back(s.pmf.size());
  return sizes;
}

std::uint64_t ValidatedNetwork::table_cells() const noexcept {
  return saturating_mul(saturating_mul(source_tuples_, joint_inputs_), joint_outputs_);
}

ValidatedNetwork validate_network(NetworkSpec spec) {
  ValidatedNetwork net;
  if (auto* s = std::get_if<StructuredNetwork>(&spec)) {
    if (s->parties.empty()) throw StructureError("network has no parties");
    for (SourceSpec& src : s->sources) {
      if (src.visible_to.empty()) {
        throw StructureError("source '" + src.id + "' is visible to no party");
      }
      std::sort(src.visible_to.begin(), src.visible_to.end());
      src.visible_to.erase(std::unique(src.visible_to.begin(), src.visible_to.end()),
                           src.visible_to.end());
      if (src.visible_to.back() >= s->parties.size()) {
        throw StructureError("source '" + src.id + "' references a missing party");
      }
    }
    sort_and_check_sources(s->sources);

    for (std::size_t p = 0; p < s->parties.size(); ++p) {
      const PartySpec& ps = s->parties[p];
      if (ps.input_size == 0 || ps.output_size == 0) {
        throw StructureError("party '" + ps.name + "' has an empty alphabet");
      }
      ValidatedNetwork::Party party;
      party.name = ps.name;
      party.inputs = ps.input_size;
      party.outputs = ps.output_size;
      for (std::size_t i = 0; i < s->sources.size(); ++i) {
        const auto& vis = s->sources[i].visible_to;
        if (std::binary_search(vis.begin(), vis.end(), p)) {
          party.visible.push_back(i);
          party.visible_tuples =
              checked_product(party.visible_tuples, s->sources[i].pmf.size(), "visible tuples");
        }
      }
      party.strategy = flatten_rows(ps.strategy, ps.input_size, party.visible_tuples,
                                    ps.output_size, "strategy of party '" + ps.name + "'");
      net.joint_inputs_ = checked_product(net.joint_inputs_, ps.input_size, "joint inputs");
      net.joint_outputs_ = checked_product(net.joint_outputs_, ps.output_size, "joint outputs");
      net.parties_.push_back(std::move(party));
    }
    net.source_tuples_ = tuple_count(s->sources);
  } else {
    auto& b = std::get<BlackboxNetwork>(spec);
    if (b.input_size == 0 || b.output_size == 0) {
      throw StructureError("blackbox network has an empty alphabet");
    }
    sort_and_check_sources(b.sources);
    net.joint_inputs_ = b.input_size;
    net.joint_outputs_ = b.output_size;
    net.source_tuples_ = tuple_count(b.sources);
    if (net.source_tuples_ > std::numeric_limits<std::size_t>::max()) {
      throw Overflow("source tuple count overflows");
    }
    net.kernel_ = flatten_rows(b.kernel, b.input_size, static_cast<std::size_t>(net.source_tuples_),
                               b.output_size, "kernel");
  }
  net.spec_ = std::move(spec);
  return net;
}

// ---------------------------------------------------------------------------
// Evaluation

void party_kernel_row(const ValidatedNetwork& net, std::size_t x,
                      std::span<const std::size_t> source_digits, std::span<double> out) {
  const auto parties = net.parties();
  const auto sources = net.sources();
  assert(out.size() == net.joint_outputs());

  // Split the joint input, party 0 most significant.
  std::size_t inputs_below = net.joint_inputs();
  std::size_t len = 1;
  out[0] = 1.0;
  for (const auto& party : parties) {
    inputs_below /= party.inputs;
    const std::size_t own_input = (x / inputs_below) % party.inputs;
    std::size_t vt = 0;
    for (std::size_t s : party.visible) vt = vt * sources[s].pmf.size() + source_digits[s];
    const double* row =
        party.strategy.data() + (own_input * party.visible_tuples + vt) * party.outputs;
    // Expand in place from the back so unread prefix entries survive.
    for (std::size_t i = len; i-- > 0;) {
      const double scale = out[i];
      kernels::scaled_copy(scale, {row, party.outputs}, out.subspan(i * party.outputs, party.outputs));
    }
    len *= party.outputs;
  }
}

ConditionalDistribution evaluate(const ValidatedNetwork& net, const EvalOptions& opts) {
  if (net.table_cells() > opts.enumeration_cap) {
    throw EnumerationCapExceeded("exact evaluation needs " + std::to_string(net.table_cells()) +
                                 " table cells; cap is " + std::to_string(opts.enumeration_cap));
  }
  const auto sources = net.sources();
  const MixedRadix tuples(net.source_sizes());
  const std::size_t n_inputs = net.joint_inputs();
  const std::size_t n_outputs = net.joint_outputs();

  ConditionalDistribution result(n_inputs, n_outputs);
  std::vector<std::size_t> digits(sources.size());
  std::vector<double> row(n_outputs);
  for (std::size_t r = 0; r < tuples.size(); ++r) {
    tuples.decode(r, digits);
    double weight = 1.0;
    for (std::size_t i = 0; i < sources.size(); ++i) weight *= sources[i].pmf[digits[i]];
    if (weight == 0.0) continue;
    for (std::size_t x = 0; x < n_inputs; ++x) {
      if (net.is_blackbox()) {
        const double* k = net.kernel().data() + (x * tuples.size() + r) * n_outputs;
        kernels::axpy(weight, {k, n_outputs}, result.row(x));
      } else {
        party_kernel_row(net, x, digits, row);
        kernels::axpy(weight, row, result.row(x));
      }
    }
  }
  return result;
}

double infinity_distance(const ConditionalDistribution& p, const ConditionalDistribution& q) {
  if (p.inputs() != q.inputs() || p.outputs() != q.outputs()) {
    throw ShapeMismatch("infinity_distance: tables have different shapes");
  }
  return kernels::max_abs_diff(p.table(), q.table());
}

ConditionalDistribution outer_product(const ConditionalDistribution& p1,
                                      const ConditionalDistribution& p2) {
  ConditionalDistribution out(p1.inputs() * p2.inputs(), p1.outputs() * p2.outputs());
  for (std::size_t x1 = 0; x1 < p1.inputs(); ++x1) {
    for (std::size_t x2 = 0; x2 < p2.inputs(); ++x2) {
      auto dst = out.row(x1 * p2.inputs() + x2);
      for (std::size_t a1 = 0; a1 < p1.outputs(); ++a1) {
        kernels::scaled_copy(p1.at(x1, a1), p2.row(x2), dst.subspan(a1 * p2.outputs(), p2.outputs()));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structural transforms

namespace {

// Rebuilds rows[x][t] as rows[x][index_map[t']] for every new tuple t'.
std::vector<std::vector<FinitePMF>> reindex_rows(const std::vector<std::vector<FinitePMF>>& rows,
                                                 const std::vector<std::size_t>& index_map) {
  std::vector<std::vector<FinitePMF>> out(rows.size());
  for (std::size_t x = 0; x < rows.size(); ++x) {
    out[x].reserve(index_map.size());
    for (std::size_t old_idx : index_map) out[x].push_back(rows[x][old_idx]);
  }
  return out;
}

std::vector<std::size_t> sorted_order(const std::vector<std::string>& ids) {
  std::vector<std::size_t> order(ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return ids[l] < ids[r]; });
  return order;
}

// Index map for a table axis laid out over `axis_sources` (old ids, sorted),
// after those sources take the ids `new_ids` and are re-sorted. `value_maps`
// optionally shrinks a source's alphabet (keyed by position in axis_sources).
std::vector<std::size_t> relayout(const std::vector<std::size_t>& radices,
                                  const std::vector<std::string>& new_ids,
                                  const std::vector<std::vector<std::size_t>>& value_maps) {
  std::vector<AxisMap> axes;
  for (std::size_t from : sorted_order(new_ids)) axes.push_back({from, value_maps[from]});
  return remap_tuples(radices, axes);
}

struct SourceEdit {
  std::vector<std::string> new_ids;                  // per current (sorted) source
  std::vector<FinitePMF> new_pmfs;                   // per current source
  std::vector<std::vector<std::size_t>> value_maps;  // per current source, empty = identity
};

ValidatedNetwork apply_source_edit(const ValidatedNetwork& net, const SourceEdit& edit) {
  const auto sources = net.sources();
  {
    std::set<std::string> seen(edit.new_ids.begin(), edit.new_ids.end());
    if (seen.size() != edit.new_ids.size()) throw StructureError("renamed source ids collide");
  }

  std::vector<SourceSpec> new_sources(sources.begin(), sources.end());
  for (std::size_t i = 0; i < new_sources.size(); ++i) {
    new_sources[i].id = edit.new_ids[i];
    new_sources[i].pmf = edit.new_pmfs[i];
  }

  if (net.is_blackbox()) {
    BlackboxNetwork b = std::get<BlackboxNetwork>(net.spec());
    const auto map = relayout(net.source_sizes(), edit.new_ids, edit.value_maps);
    b.kernel = reindex_rows(b.kernel, map);
    b.sources = std::move(new_sources);
    return validate_network(std::move(b));
  }

  StructuredNetwork s = std::get<StructuredNetwork>(net.spec());
  const auto parties = net.parties();
  for (std::size_t p = 0; p < parties.size(); ++p) {
    std::vector<std::size_t> radices;
    std::vector<std::string> ids;
    std::vector<std::vector<std::size_t>> vmaps;
    for (std::size_t src : parties[p].visible) {
      radices.push_back(sources[src].pmf.size());
      ids.push_back(edit.new_ids[src]);
      vmaps.push_back(edit.value_maps[src]);
    }
    s.parties[p].strategy = reindex_rows(s.parties[p].strategy, relayout(radices, ids, vmaps));
  }
  s.sources = std::move(new_sources);
  return validate_network(std::move(s));
}

SourceEdit identity_edit(const ValidatedNetwork& net) {
  SourceEdit edit;
  for (const SourceSpec& s : net.sources()) {
    edit.new_ids.push_back(s.id);
    edit.new_pmfs.push_back(s.pmf);
    edit.value_maps.emplace_back();
  }
  return edit;
}

}  // namespace

ValidatedNetwork rename_sources(const ValidatedNetwork& net,
                                const std::map<std::string, std::string>& renames) {
  SourceEdit edit = identity_edit(net);
  for (const auto& [from, to] : renames) {
    const auto idx = net.source_index(from);
    if (!idx) throw SourceNotFound("no source '" + from + "'");
    edit.new_ids[*idx] = to;
  }
  return apply_source_edit(net, edit);
}

ValidatedNetwork substitute_source(const ValidatedNetwork& net, std::size_t source_index,
                                   FinitePMF pmf, std::span<const std::size_t> value_map) {
  const auto sources = net.sources();
  if (source_index >= sources.size()) throw SourceNotFound("source index out of range");
  if (pmf.size() != value_map.size()) {
    throw ShapeMismatch("substitute_source: PMF and value map sizes differ");
  }
  for (std::size_t v : value_map) {
    if (v >= sources[source_index].pmf.size()) {
      throw ShapeMismatch("substitute_source: value map points outside the old alphabet");
    }
  }
  SourceEdit edit = identity_edit(net);
  edit.new_pmfs[source_index] = std::move(pmf);
  edit.value_maps[source_index].assign(value_map.begin(), value_map.end());
  return apply_source_edit(net, edit);
}

ValidatedNetwork to_blackbox(const ValidatedNetwork& net) {
  if (net.is_blackbox()) return net;
  const auto sources = net.sources();
  const MixedRadix tuples(net.source_sizes());
  BlackboxNetwork b;
  b.input_size = net.joint_inputs();
  b.output_size = net.joint_outputs();
  b.sources.assign(sources.begin(), sources.end());
  b.kernel.assign(b.input_size, std::vector<FinitePMF>(tuples.size()));
  std::vector<std::size_t> digits(sources.size());
  std::vector<double> row(b.output_size);
  for (std::size_t x = 0; x < b.input_size; ++x) {
    for (std::size_t r = 0; r < tuples.size(); ++r) {
      tuples.decode(r, digits);
      party_kernel_row(net, x, digits, row);
      b.kernel[x][r] = FinitePMF(row);
    }
  }
  return validate_network(std::move(b));
}

ValidatedNetwork product_compose(const ValidatedNetwork& n1, const ValidatedNetwork& n2) {
  std::set<std::string> taken;
  for (const SourceSpec& s : n1.sources()) taken.insert(s.id);
  std::set<std::string> n2_ids;
  for (const SourceSpec& s : n2.sources()) n2_ids.insert(s.id);

  std::map<std::string, std::string> renames;
  for (const SourceSpec& s : n2.sources()) {
    std::string id = s.id;
    while (taken.count(id) != 0 || (id != s.id && n2_ids.count(id) != 0)) id += "_2";
    taken.insert(id);
    if (id != s.id) renames[s.id] = id;
  }
  const ValidatedNetwork n2r = renames.empty() ? n2 : rename_sources(n2, renames);

  if (!n1.is_blackbox() && !n2r.is_blackbox()) {
    StructuredNetwork s = std::get<StructuredNetwork>(n1.spec());
    const auto& s2 = std::get<StructuredNetwork>(n2r.spec());
    const std::size_t offset = s.parties.size();
    s.parties.insert(s.parties.end(), s2.parties.begin(), s2.parties.end());
    for (SourceSpec src : s2.sources) {
      for (std::size_t& p : src.visible_to) p += offset;
      s.sources.push_back(std::move(src));
    }
    return validate_network(std::move(s));
  }

  const ValidatedNetwork b1 = to_blackbox(n1);
  const ValidatedNetwork b2 = to_blackbox(n2r);
  const auto src1 = b1.sources();
  const auto src2 = b2.sources();

  BlackboxNetwork out;
  out.input_size = b1.joint_inputs() * b2.joint_inputs();
  out.output_size = b1.joint_outputs() * b2.joint_outputs();
  out.sources.assign(src1.begin(), src1.end());
  out.sources.insert(out.sources.end(), src2.begin(), src2.end());
  for (SourceSpec& s : out.sources) s.visible_to.clear();
  std::sort(out.sources.begin(), out.sources.end(),
            [](const SourceSpec& l, const SourceSpec& r) { return l.id < r.id; });

  // Position of each composed source in b1's or b2's tuple.
  std::vector<std::size_t> pos1(src1.size()), pos2(src2.size());
  std::vector<std::size_t> radices;
  for (std::size_t i = 0; i < out.sources.size(); ++i) {
    radices.push_back(out.sources[i].pmf.size());
    if (auto j = b1.source_index(out.sources[i].id)) {
      pos1[*j] = i;
    } else {
      pos2[*b2.source_index(out.sources[i].id)] = i;
    }
  }
  const MixedRadix composed(radices);
  const MixedRadix layout1(b1.source_sizes());
  const MixedRadix layout2(b2.source_sizes());
  std::vector<std::size_t> digits(radices.size()), d1(src1.size()), d2(src2.size());

  const std::size_t a2n = b2.joint_outputs();
  out.kernel.assign(out.input_size, std::vector<FinitePMF>(composed.size()));
  std::vector<double> row(out.output_size);
  for (std::size_t r = 0; r < composed.size(); ++r) {
    composed.decode(r, digits);
    for (std::size_t j = 0; j < src1.size(); ++j) d1[j] = digits[pos1[j]];
    for (std::size_t j = 0; j < src2.size(); ++j) d2[j] = digits[pos2[j]];
    const std::size_t r1 = layout1.encode(d1);
    const std::size_t r2 = layout2.encode(d2);
    for (std::size_t x1 = 0; x1 < b1.joint_inputs(); ++x1) {
      const double* k1 = b1.kernel().data() + (x1 * layout1.size() + r1) * b1.joint_outputs();
      for (std::size_t x2 = 0; x2 < b2.joint_inputs(); ++x2) {
        const double* k2 = b2.kernel().data() + (x2 * layout2.size() + r2) * a2n;
        for (std::size_t a1 = 0; a1 < b1.joint_outputs(); ++a1) {
          kernels::scaled_copy(k1[a1], {k2, a2n}, std::span<double>(row).subspan(a1 * a2n, a2n));
        }
        out.kernel[x1 * b2.joint_inputs() + x2][r] = FinitePMF(row);
      }
    }
  }
  return validate_network(std::move(out));
}

}  // namespace randcomp
