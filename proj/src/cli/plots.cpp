#include "bef/cli/plots.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "bef/error.hpp"

namespace bef::cli {

using io::Json;

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 460.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 200.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

const char* color(std::size_t i) { return kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))]; }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const {
    return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

class Canvas {
 public:
  Canvas(const std::string& title, const Frame& frame) : frame_(frame) {
    out_ += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
        "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
        kWidth, kHeight, kWidth, kHeight);
    out_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out_ += fmt::format("<text x=\"{:.1f}\" y=\"24\" font-size=\"15\">{}</text>\n", kLeft,
                        escape(title));
    out_ += fmt::format(
        "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
        "stroke=\"black\"/>\n",
        kLeft, kTop, kWidth - kLeft - kRight, kHeight - kTop - kBottom);
  }

  void x_tick(double x, const std::string& label) {
    const double px = frame_.px(x);
    const double base = kHeight - kBottom;
    out_ += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n",
                        px, base, base + 5);
    out_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", px,
                        base + 19, escape(label));
  }

  void y_tick(double y, const std::string& label) {
    const double py = frame_.py(y);
    out_ += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#dddddd\"/>\n",
                        kLeft, py, kWidth - kRight);
    out_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", kLeft - 6,
                        py + 4, escape(label));
  }

  void axis_labels(const std::string& x, const std::string& y) {
    out_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                        (kLeft + kWidth - kRight) / 2, kHeight - 16, escape(x));
    out_ += fmt::format(
        "<text x=\"18\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.2f})\">{1}</text>\n",
        (kTop + kHeight - kBottom) / 2, escape(y));
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const char* stroke) {
    if (pts.size() < 2) return;
    std::string points;
    for (const auto& [x, y] : pts) {
      if (!points.empty()) points += ' ';
      points += fmt::format("{:.2f},{:.2f}", frame_.px(x), frame_.py(y));
    }
    out_ += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                        points, stroke);
  }

  void marker(double x, double y, const char* stroke, bool filled) {
    out_ += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\" fill=\"{}\" stroke=\"{}\"/>\n",
                        frame_.px(x), frame_.py(y), filled ? stroke : "white", stroke);
  }

  void triangle(double x, double y, const char* stroke) {
    const double px = frame_.px(x), py = frame_.py(y);
    out_ += fmt::format("<polygon points=\"{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}\" fill=\"{}\"/>\n",
                        px, py - 5, px - 4.5, py + 3, px + 4.5, py + 3, stroke);
  }

  void hline(double y, const std::string& label) {
    const double py = frame_.py(y);
    out_ += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"gray\" "
        "stroke-dasharray=\"4 3\"/>\n",
        kLeft, py, kWidth - kRight);
    out_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" fill=\"gray\">{}</text>\n", kLeft + 4,
                        py - 4, escape(label));
  }

  void text(double x, double y, const std::string& s) {
    out_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\">{}</text>\n",
                        frame_.px(x) + 5, frame_.py(y) - 5, escape(s));
  }

  void legend(const std::vector<std::string>& names) {
    const double x = kWidth - kRight + 14;
    for (std::size_t i = 0; i < names.size(); ++i) {
      const double y = kTop + 10 + 18.0 * static_cast<double>(i);
      out_ += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                          x, y, x + 18, y, color(i));
      out_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", x + 24, y + 4,
                          escape(names[i]));
    }
  }

  std::string finish() { return out_ + "</svg>\n"; }

 private:
  Frame frame_;
  std::string out_;
};

void integer_ticks(Canvas& c, int lo, int hi) {
  const int step = std::max(1, (hi - lo) / 10 + ((hi - lo) % 10 != 0 ? 1 : 0));
  for (int x = lo; x <= hi; x += step) c.x_tick(x, std::to_string(x));
}

Json load_json(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::MissingInput, fmt::format("no such report file '{}'", path));
  }
  try {
    return Json::parse(io::read_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MissingInput, fmt::format("{} is not valid JSON: {}", path, e.what()));
  }
}

}  // namespace

std::string mu_decay_svg(const std::vector<BoundaryProfile>& profiles) {
  int r_lo = std::numeric_limits<int>::max(), r_hi = std::numeric_limits<int>::min();
  double floor = 1e-12;
  double y_lo = 0.0;
  for (const auto& p : profiles) {
    floor = std::max(floor, p.noise_floor);
    for (const auto& [r, mu] : p.mu_hat) {
      r_lo = std::min(r_lo, r);
      r_hi = std::max(r_hi, r);
      if (mu > 0.0) y_lo = std::min(y_lo, std::floor(std::log10(mu)));
    }
  }
  if (r_lo > r_hi) r_lo = r_hi = 1;
  const double floor_y = std::log10(floor);
  y_lo = std::min(y_lo, std::floor(floor_y));
  const Frame frame{r_lo - 0.5, r_hi + 0.5, y_lo - 0.5, 0.5};
  Canvas c("boundary effect decay", frame);
  integer_ticks(c, r_lo, r_hi);
  const int y_step = std::max(1, static_cast<int>(-y_lo) / 8);
  for (int e = 0; e >= static_cast<int>(y_lo); e -= y_step) c.y_tick(e, fmt::format("1e{}", e));
  c.axis_labels("r", "mu_hat(r)");
  c.hline(floor_y, "noise floor");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    names.push_back(fmt::format("{} ({})", p.model_id, describe(p.ordering)));
    std::vector<std::pair<double, double>> line;
    for (const auto& [r, mu] : p.mu_hat) {
      const bool zero = !(mu > 0.0);
      const double y = zero ? floor_y : std::log10(mu);
      line.emplace_back(r, y);
    }
    c.polyline(line, color(i));
    for (const auto& [r, mu] : p.mu_hat) {
      const bool zero = !(mu > 0.0);
      c.marker(r, zero ? floor_y : std::log10(mu), color(i), !zero);
    }
  }
  c.legend(names);
  return c.finish();
}

std::string gap_kappa_svg(const std::vector<GapKappaRow>& rows) {
  double gx0 = std::numeric_limits<double>::infinity(), gx1 = -gx0;
  double ky0 = 0.0, ky1 = 0.0;
  for (const auto& r : rows) {
    if (std::isfinite(r.gap)) {
      gx0 = std::min(gx0, r.gap);
      gx1 = std::max(gx1, r.gap);
    }
    if (std::isfinite(r.kappa)) {
      ky0 = std::min(ky0, r.kappa);
      ky1 = std::max(ky1, r.kappa);
    }
  }
  if (!(gx0 <= gx1)) gx0 = 0.0, gx1 = 1.0;
  if (gx1 - gx0 < 1e-9) gx0 -= 0.5, gx1 += 0.5;
  if (ky1 - ky0 < 1e-9) ky1 = ky0 + 1.0;
  const double xpad = 0.08 * (gx1 - gx0), ypad = 0.12 * (ky1 - ky0);
  const Frame frame{gx0 - xpad, gx1 + xpad, ky0 - ypad, ky1 + 2 * ypad};
  Canvas c("decay rate against gap", frame);
  for (int i = 0; i <= 5; ++i) {
    const double x = gx0 + (gx1 - gx0) * i / 5.0;
    c.x_tick(x, fmt::format("{:.3g}", x));
  }
  for (int i = 0; i <= 5; ++i) {
    const double y = ky0 + (ky1 - ky0) * i / 5.0;
    c.y_tick(y, fmt::format("{:.3g}", y));
  }
  c.axis_labels("gap E1 - E0 at n_max", "kappa");
  std::map<std::string, std::size_t> series;
  for (const auto& r : rows) {
    if (!std::isfinite(r.gap)) continue;
    const auto family = r.model_id.substr(0, r.model_id.find('@'));
    const auto idx = series.emplace(family, series.size()).first->second;
    if (std::isinf(r.kappa)) {
      c.triangle(r.gap, ky1 + 1.5 * ypad, color(idx));
      c.text(r.gap, ky1 + 1.5 * ypad, fmt::format("{:g} (inf)", r.parameter));
    } else if (std::isfinite(r.kappa)) {
      c.marker(r.gap, r.kappa, color(idx), !r.flagged);
      c.text(r.gap, r.kappa, fmt::format("{:g}", r.parameter));
    }
  }
  std::vector<std::string> names(series.size());
  for (const auto& [name, idx] : series) names[idx] = name;
  c.legend(names);
  return c.finish();
}

std::string entropy_growth_svg(const std::vector<io::EntropyRecord>& records) {
  std::map<std::pair<std::string, int>, std::vector<std::pair<double, double>>> curves;
  std::vector<std::pair<std::string, int>> order;
  int n_lo = std::numeric_limits<int>::max(), n_hi = std::numeric_limits<int>::min();
  double s_hi = 0.0;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.model_id, r.m);
    if (!curves.count(key)) order.push_back(key);
    curves[key].emplace_back(r.n, r.entropy);
    n_lo = std::min(n_lo, r.n);
    n_hi = std::max(n_hi, r.n);
    s_hi = std::max(s_hi, r.entropy);
  }
  if (n_lo > n_hi) n_lo = n_hi = 1;
  if (s_hi <= 0.0) s_hi = 1.0;
  const Frame frame{n_lo - 0.5, n_hi + 0.5, 0.0, s_hi * 1.15};
  Canvas c("entanglement entropy growth", frame);
  integer_ticks(c, n_lo, n_hi);
  for (int i = 0; i <= 5; ++i) {
    const double y = s_hi * i / 5.0;
    c.y_tick(y, fmt::format("{:.3g}", y));
  }
  c.axis_labels("n", "S(rho_A) [bits]");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto pts = curves[order[i]];
    std::sort(pts.begin(), pts.end());
    c.polyline(pts, color(i));
    for (const auto& [x, y] : pts) c.marker(x, y, color(i), true);
    names.push_back(fmt::format("{} m={}", order[i].first, order[i].second));
  }
  c.legend(names);
  return c.finish();
}

std::vector<std::string> emit_plots(const std::vector<std::string>& json_files,
                                    const std::string& out_dir) {
  std::vector<BoundaryProfile> profiles;
  std::vector<GapKappaRow> gap_rows;
  std::vector<io::EntropyRecord> entropy;
  for (const auto& path : json_files) {
    const Json doc = load_json(path);
    const auto kind = doc.value("kind", "");
    if (kind == "mu-profile") {
      for (const auto& item : doc.at("profiles")) profiles.push_back(io::profile_from_json(item.at("profile")));
    } else if (kind == "gap-scan") {
      for (const auto& row : doc.at("rows")) gap_rows.push_back(io::gap_row_from_json(row));
    } else if (kind == "entropy-scan") {
      for (const auto& rec : doc.at("records")) entropy.push_back(io::entropy_from_json(rec));
    }
  }
  std::vector<std::string> written;
  auto write = [&](const std::string& name, const std::string& svg) {
    const auto path = (std::filesystem::path(out_dir) / name).string();
    io::write_file(path, svg);
    written.push_back(path);
  };
  if (!profiles.empty()) write("mu_decay.svg", mu_decay_svg(profiles));
  if (!gap_rows.empty()) write("gap_kappa.svg", gap_kappa_svg(gap_rows));
  if (!entropy.empty()) write("entropy_growth.svg", entropy_growth_svg(entropy));
  if (written.empty()) throw Error(ErrorCode::MissingInput, "no plottable report in the inputs");
  return written;
}

}  // namespace bef::cli
