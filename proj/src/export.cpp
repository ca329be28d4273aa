#include "ccrrt/export.hpp"

#include <cstdio>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace ccrrt {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt(const Eigen::Vector2d& v) { return "[" + fmt(v.x()) + "," + fmt(v.y()) + "]"; }

void append_report(std::ostringstream& out, const MCReport& r) {
  out << "{\"samples\":" << r.samples << ",\"hits\":" << r.hits << ",\"estimate\":"
      << fmt(r.estimate) << ",\"std_error\":" << fmt(r.std_error) << ",\"seed\":" << r.seed
      << "}";
}

}  // namespace

std::string to_json(const PlanResult& result) {
  std::ostringstream out;
  out << "{\"seed\":" << result.seed << ",\"iterations_used\":" << result.iterations_used
      << ",\"cost\":" << (result.cost ? fmt(*result.cost) : "null") << ",\"best_path\":";
  if (result.best_path) {
    out << "[";
    for (std::size_t i = 0; i < result.best_path->size(); ++i) {
      if (i) out << ",";
      out << fmt((*result.best_path)[i]);
    }
    out << "]";
  } else {
    out << "null";
  }
  out << ",\"feasibility_certificates\":[";
  for (std::size_t i = 0; i < result.feasibility_certificates.size(); ++i) {
    if (i) out << ",";
    out << (result.feasibility_certificates[i] ? "true" : "false");
  }
  out << "],\"tree\":{\"nodes\":[";
  for (const Node& n : result.tree.nodes()) {
    if (n.id) out << ",";
    out << "{\"id\":" << n.id << ",\"position\":" << fmt(n.position) << ",\"parent\":";
    if (n.parent < 0) {
      out << "null";
    } else {
      out << n.parent;
    }
    out << ",\"cost\":" << fmt(n.cost) << ",\"depth\":" << n.depth << "}";
  }
  out << "]}}";
  return out.str();
}

std::string to_json(const MCReport& report) {
  std::ostringstream out;
  append_report(out, report);
  return out.str();
}

std::string to_json(const ValidationSummary& summary) {
  std::ostringstream out;
  out << "{\"delta\":" << fmt(summary.delta) << ",\"budget_ok\":"
      << (summary.budget_ok ? "true" : "false") << ",\"coverage\":[";
  for (std::size_t i = 0; i < summary.coverage.size(); ++i) {
    if (i) out << ",";
    append_report(out, summary.coverage[i]);
  }
  out << "],\"path_risk\":";
  if (summary.path_risk) {
    append_report(out, *summary.path_risk);
  } else {
    out << "null";
  }
  out << ",\"rollout_t_goal\":";
  if (summary.rollout_t_goal) {
    out << *summary.rollout_t_goal;
  } else {
    out << "null";
  }
  out << "}";
  return out.str();
}

std::string ellipses_json(const ObstacleField& field) {
  std::ostringstream out;
  out << "{\"alpha\":" << fmt(field.risk().alpha) << ",\"threshold\":" << fmt(field.threshold())
      << ",\"ellipses\":[";
  for (std::size_t i = 0; i < field.obstacles().size(); ++i) {
    if (i) out << ",";
    const auto e = risk_ellipse(field.obstacles()[i].gaussian, field.risk().alpha);
    out << "{\"center\":" << fmt(e.center) << ",\"semi_axes\":" << fmt(e.semi_axes)
        << ",\"rotation\":" << fmt(e.rotation) << ",\"polyline\":[";
    for (int k = 0; k < 64; ++k) {
      if (k) out << ",";
      out << fmt(ellipse_point(e, 2.0 * std::numbers::pi * k / 64.0));
    }
    out << "]}";
  }
  out << "]}";
  return out.str();
}

std::string to_svg(const PlanResult& result, const ObstacleField& field, const Workspace& ws) {
  const double w = ws.upper.x() - ws.lower.x();
  const double h = ws.upper.y() - ws.lower.y();
  // SVG y grows downward; mirror into workspace coordinates.
  const auto my = [&](double y) { return ws.lower.y() + ws.upper.y() - y; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt(ws.lower.x()) << " "
      << fmt(ws.lower.y()) << " " << fmt(w) << " " << fmt(h) << "\">\n";

  for (const auto& ob : field.obstacles()) {
    const auto e = risk_ellipse(ob.gaussian, field.risk().alpha);
    out << "<polygon class=\"ellipse\" fill=\"#d0e0f0\" stroke=\"#4060a0\" stroke-width=\"0.03\" points=\"";
    for (int k = 0; k < 64; ++k) {
      if (k) out << " ";
      const Eigen::Vector2d p = ellipse_point(e, 2.0 * std::numbers::pi * k / 64.0);
      out << fmt(p.x()) << "," << fmt(my(p.y()));
    }
    out << "\"/>\n";
  }

  for (const Node& n : result.tree.nodes()) {
    if (n.parent >= 0) {
      const Eigen::Vector2d& a = result.tree.node(n.parent).position;
      out << "<line class=\"edge\" stroke=\"#b0b0b0\" stroke-width=\"0.02\" x1=\"" << fmt(a.x())
          << "\" y1=\"" << fmt(my(a.y())) << "\" x2=\"" << fmt(n.position.x()) << "\" y2=\""
          << fmt(my(n.position.y())) << "\"/>\n";
    }
  }
  for (const Node& n : result.tree.nodes()) {
    out << "<circle class=\"node\" fill=\"#404040\" r=\"0.04\" cx=\"" << fmt(n.position.x())
        << "\" cy=\"" << fmt(my(n.position.y())) << "\"/>\n";
  }

  if (result.best_path) {
    out << "<polyline class=\"path\" fill=\"none\" stroke=\"#c03020\" stroke-width=\"0.08\" points=\"";
    for (std::size_t i = 0; i < result.best_path->size(); ++i) {
      if (i) out << " ";
      out << fmt((*result.best_path)[i].x()) << "," << fmt(my((*result.best_path)[i].y()));
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

LoadedResult load_result_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  LoadedResult out;
  out.seed = doc.at("seed").get<std::uint64_t>();
  out.node_count = static_cast<int>(doc.at("tree").at("nodes").size());
  if (!doc.at("cost").is_null()) out.cost = doc["cost"].get<double>();
  if (!doc.at("best_path").is_null()) {
    std::vector<Eigen::Vector2d> path;
    for (const auto& p : doc["best_path"]) {
      path.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    }
    out.best_path = std::move(path);
  }
  return out;
}

std::vector<Eigen::Vector2d> load_path_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  const nlohmann::json* arr = &doc;
  if (doc.is_object()) {
    if (doc.contains("best_path") && !doc["best_path"].is_null()) {
      arr = &doc["best_path"];
    } else if (doc.contains("path")) {
      arr = &doc["path"];
    } else {
      throw std::runtime_error("load_path_json: no path found in document");
    }
  }
  std::vector<Eigen::Vector2d> path;
  for (const auto& p : *arr) {
    path.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  }
  return path;
}

}  // namespace ccrrt
