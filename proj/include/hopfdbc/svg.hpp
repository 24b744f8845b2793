#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

#include "hopfdbc/continuation.hpp"

namespace hopfdbc {

/// Static (mu, r) diagram of a branch with the parabola mu = mu_* + mu2 r^2.
inline void write_branch_svg(std::ostream& out, const Branch& b, double mu_star, double mu2, const std::string& title) {
  constexpr double W = 640, H = 480, pad = 56;
  double mu_lo = mu_star, mu_hi = mu_star, r_hi = 0.0;
  for (const auto& p : b.points) {
    mu_lo = std::min(mu_lo, p.mu);
    mu_hi = std::max(mu_hi, p.mu);
    r_hi = std::max(r_hi, p.r);
  }
  if (r_hi <= 0.0) r_hi = 1.0;
  if (mu_hi - mu_lo <= 0.0) {
    mu_lo -= 0.5;
    mu_hi += 0.5;
  }
  const double span = mu_hi - mu_lo;
  mu_lo -= 0.05 * span;
  mu_hi += 0.05 * span;
  r_hi *= 1.05;
  auto X = [&](double mu) { return pad + (mu - mu_lo) / (mu_hi - mu_lo) * (W - 2 * pad); };
  auto Y = [&](double r) { return H - pad - r / r_hi * (H - 2 * pad); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return std::string(buf);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";
  out << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\" font-family=\"sans-serif\">mu</text>\n";
  out << "<text x=\"18\" y=\"" << H / 2 << "\" font-family=\"sans-serif\">r</text>\n";
  for (double mu : {mu_lo, 0.5 * (mu_lo + mu_hi), mu_hi}) {
    out << "<text x=\"" << X(mu) << "\" y=\"" << H - pad + 18 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << num(mu) << "</text>\n";
  }
  out << "<text x=\"" << pad - 6 << "\" y=\"" << Y(r_hi) + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
      << "font-size=\"11\">" << num(r_hi) << "</text>\n";

  // Asymptotic parabola, clipped to the plot box.
  out << "<polyline fill=\"none\" stroke=\"magenta\" stroke-width=\"1.5\" points=\"";
  for (int i = 0; i <= 200; ++i) {
    const double r = r_hi * i / 200.0;
    const double mu = mu_star + mu2 * r * r;
    if (mu < mu_lo || mu > mu_hi) continue;
    out << X(mu) << ',' << Y(r) << ' ';
  }
  out << "\"/>\n";
  for (const auto& p : b.points) {
    const char* colour = p.stability == Stability::stable     ? "blue"
                         : p.stability == Stability::unstable ? "red"
                                                              : "black";
    out << "<circle cx=\"" << X(p.mu) << "\" cy=\"" << Y(p.r) << "\" r=\"2\" fill=\"" << colour << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace hopfdbc
