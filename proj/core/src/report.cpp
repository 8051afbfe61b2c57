#include "vaq/report.hpp"

#include <fstream>
#include <set>

namespace vaq::bench {

void save_report(const WorkloadReport &report, const std::string &json_path) {
  std::ofstream out(json_path, std::ios::trunc);
  if (!out) throw DataError("cannot write report: " + json_path);
  out << report.to_json().dump(2) << "\n";
}

WorkloadReport load_report(const std::string &json_path) {
  std::ifstream in(json_path);
  if (!in) throw DataError("cannot open report: " + json_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception &e) {
    throw DataError("malformed report JSON: " + std::string(e.what()));
  }
  return WorkloadReport::from_json(j);
}

void write_report_csv(const WorkloadReport &report, const std::string &path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write report CSV: " + path);
  out << "template,config,latency_ms,est_card,true_card,q_error,sample_size,"
         "plan_hash\n";
  for (const auto &r : report.records) {
    out << r.template_name << ',' << r.config_name << ',' << r.latency_ms
        << ',' << r.est_card << ',' << r.true_card << ',' << r.q_error << ','
        << r.sample_size << ',' << r.plan_hash << '\n';
  }
}

namespace {

// Scan methods per relation and the (join op, keys) sequence of a plan tree.
void walk_plan(const nlohmann::json &node,
               std::map<std::string, std::string> &scan_methods,
               std::vector<std::pair<std::string, std::string>> &joins,
               std::vector<std::string> &leaf_order) {
  const auto op = node.at("op").get<std::string>();
  if (op == "SeqScan" || op == "VectorIndexScan") {
    const auto rel = node.value("relation", std::string{});
    scan_methods[rel] = op;
    leaf_order.push_back(rel);
  }
  if (op == "HashJoin" || op == "IndexNestedLoopJoin")
    joins.emplace_back(op, node.value("detail", std::string{}));
  for (const auto &c : node.at("children"))
    walk_plan(c, scan_methods, joins, leaf_order);
  if (op == "IndexNestedLoopJoin") {
    // The inner lookup relation does not appear as a child scan node.
    const auto detail = node.value("detail", std::string{});
    const auto pos = detail.find("inner=");
    if (pos != std::string::npos)
      leaf_order.push_back(detail.substr(pos + 6));
  }
}

}  // namespace

PlanDiff diff_plans(const nlohmann::json &base_plan,
                    const nlohmann::json &other_plan) {
  PlanDiff diff;
  std::map<std::string, std::string> scans_a, scans_b;
  std::vector<std::pair<std::string, std::string>> joins_a, joins_b;
  std::vector<std::string> order_a, order_b;
  walk_plan(base_plan.at("plan"), scans_a, joins_a, order_a);
  walk_plan(other_plan.at("plan"), scans_b, joins_b, order_b);

  const auto jo_a = base_plan.value("join_order", nlohmann::json::array());
  const auto jo_b = other_plan.value("join_order", nlohmann::json::array());
  if (jo_a != jo_b) {
    diff.join_order_changed = true;
    diff.details.push_back("join-order: " + jo_a.dump() + " -> " + jo_b.dump());
  }

  for (const auto &[rel, method] : scans_a) {
    const auto it = scans_b.find(rel);
    if (it != scans_b.end() && it->second != method) {
      diff.scan_method_changed = true;
      diff.details.push_back("scan-method[" + rel + "]: " + method + " -> " +
                             it->second);
    }
  }

  // Pair up edges by their normalized key pair, then compare methods, so a
  // reordered plan still matches each join against its counterpart.
  auto methods_by_edge = [](const std::vector<std::pair<std::string, std::string>>
                                &joins) {
    std::map<std::string, std::multiset<std::string>> by_edge;
    for (const auto &[op, detail] : joins) {
      auto keys = detail;
      for (const auto *marker : {" build=", " inner="}) {
        const auto pos = keys.find(marker);
        if (pos != std::string::npos) keys = keys.substr(0, pos);
      }
      const auto eq = keys.find(" = ");
      if (eq != std::string::npos) {
        auto l = keys.substr(0, eq);
        auto r = keys.substr(eq + 3);
        if (r < l) std::swap(l, r);
        keys = l + " = " + r;
      }
      by_edge[keys].insert(op);
    }
    return by_edge;
  };
  const auto edges_a = methods_by_edge(joins_a);
  const auto edges_b = methods_by_edge(joins_b);
  for (const auto &[edge, methods] : edges_a) {
    const auto it = edges_b.find(edge);
    if (it != edges_b.end() && it->second != methods) {
      diff.join_method_changed = true;
      diff.details.push_back("join-method[" + edge + "]: " +
                             *methods.begin() + " -> " + *it->second.begin());
    }
  }
  return diff;
}

nlohmann::json compare_reports(const WorkloadReport &base,
                               const WorkloadReport &candidate) {
  if (base.manifest_hash != candidate.manifest_hash)
    throw DataError(
        "catalog mismatch: reports were produced from different catalogs "
        "(manifest hashes differ)");

  std::set<std::string> base_templates, cand_templates, shared;
  for (const auto &s : base.summaries) base_templates.insert(s.template_name);
  for (const auto &s : candidate.summaries)
    cand_templates.insert(s.template_name);
  for (const auto &t : base_templates)
    if (cand_templates.count(t)) shared.insert(t);
  if (shared.empty())
    throw DataError("reports share no templates; nothing to compare");

  const auto base_config =
      base.summaries.empty() ? "" : base.summaries.front().config_name;
  const auto cand_config = candidate.summaries.empty()
                               ? ""
                               : candidate.summaries.front().config_name;

  nlohmann::json out;
  out["baseline_config"] = base_config;
  out["candidate_config"] = cand_config;
  out["templates"] = nlohmann::json::array();
  for (const auto &t : shared) {
    const auto &sb = base.summary(t, base_config);
    const auto &sc = candidate.summary(t, cand_config);
    nlohmann::json jt;
    jt["template"] = t;
    jt["baseline_latency_ms"] = sb.latency_ms;
    jt["candidate_latency_ms"] = sc.latency_ms;
    jt["speedup"] = sc.latency_ms > 0.0 ? sb.latency_ms / sc.latency_ms : 0.0;
    jt["baseline_median_q_error"] = sb.median_q_error;
    jt["candidate_median_q_error"] = sc.median_q_error;
    jt["plan_changed"] = sb.plan_hash != sc.plan_hash;

    const std::string key_b = base_config + "/" + t;
    const std::string key_c = cand_config + "/" + t;
    if (base.plans.contains(key_b) && candidate.plans.contains(key_c)) {
      const auto diff = diff_plans(base.plans.at(key_b), candidate.plans.at(key_c));
      nlohmann::json jd;
      jd["join_order"] = diff.join_order_changed;
      jd["join_method"] = diff.join_method_changed;
      jd["scan_method"] = diff.scan_method_changed;
      jd["details"] = diff.details;
      jt["plan_diff"] = jd;
    }
    out["templates"].push_back(jt);
  }
  return out;
}

void write_sampler_trace_csv(const WorkloadReport &report,
                             const std::string &path) {
  bool adaptive = false;
  for (const auto &c : report.configs)
    if (c.value("estimator", "") == "sampling:adaptive") adaptive = true;
  if (!adaptive)
    throw DataError(
        "sampler trace requires a report from a sampling:adaptive run");

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write trace CSV: " + path);
  out << "query_index,sample_size,q_error,learning_rate\n";
  int idx = 0;
  for (const auto &r : report.records) {
    if (r.config_name != "sampling:adaptive") continue;
    out << idx++ << ',' << r.sample_size << ',' << r.q_error << ','
        << r.learning_rate << '\n';
  }
}

}  // namespace vaq::bench
