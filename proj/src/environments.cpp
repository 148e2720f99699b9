#include "lpplab/environments.hpp"

#include <cmath>

#include "lpplab/busemann.hpp"

namespace lpplab {

double RateProfile::a_at(int i) const {
  if (i < 1) throw std::invalid_argument("column index must be positive");
  if (a.empty()) throw std::invalid_argument("empty column rate sequence");
  return i <= static_cast<int>(a.size()) ? a[i - 1] : a.back();
}

double RateProfile::b_at(int j) const {
  if (j < 1) throw std::invalid_argument("row index must be positive");
  if (b.empty()) throw std::invalid_argument("empty row rate sequence");
  return j <= static_cast<int>(b.size()) ? b[j - 1] : b.back();
}

void to_json(nlohmann::json& j, const RateProfile& profile) {
  j = nlohmann::json{{"a", profile.a}, {"b", profile.b}};
}

void from_json(const nlohmann::json& j, RateProfile& profile) {
  j.at("a").get_to(profile.a);
  j.at("b").get_to(profile.b);
}

void to_json(nlohmann::json& j, const EtaSpec& spec) {
  j = nlohmann::json{
      {"k", spec.k}, {"l", spec.ell}, {"d", spec.d}, {"r", spec.directions}};
}

void from_json(const nlohmann::json& j, EtaSpec& spec) {
  j.at("k").get_to(spec.k);
  j.at("l").get_to(spec.ell);
  j.at("d").get_to(spec.d);
  j.at("r").get_to(spec.directions);
}

void EtaSpec::validate() const {
  if (k < 1 || ell < 1 || d < 1)
    throw std::invalid_argument("k, ell, d must be positive");
  if (static_cast<int>(directions.size()) != d)
    throw std::invalid_argument("direction count must equal d");
  double prev = 0.0;
  for (double r : directions) {
    if (!(r > prev) || !std::isfinite(r))
      throw std::invalid_argument("directions must be finite, positive, strictly increasing");
    prev = r;
  }
  if (!(zeta(directions.back()) < 1.0))
    throw std::invalid_argument("largest direction too extreme: zeta rounds to 1");
}

WeightGrid sample_iid_exp1(const GridBox& box, const RngStream& rng) {
  if (!box.valid()) throw std::invalid_argument("invalid box");
  WeightGrid out(box);
  for (int j = box.lo.row; j <= box.hi.row; ++j)
    for (int i = box.lo.col; i <= box.hi.col; ++i)
      out.at(i, j) = rng.exponential(1.0, RngStream::cell_key(i, j));
  return out;
}

WeightGrid sample_inhomogeneous(const RateProfile& profile, const GridBox& box,
                                const RngStream& rng) {
  if (!box.valid()) throw std::invalid_argument("invalid box");
  WeightGrid out(box);
  for (int j = box.lo.row; j <= box.hi.row; ++j) {
    for (int i = box.lo.col; i <= box.hi.col; ++i) {
      double rate = profile.rate_at(i, j);
      if (!(rate > 0.0))
        throw std::invalid_argument("nonpositive rate at cell (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
      out.at(i, j) = rng.exponential(rate, RngStream::cell_key(i, j));
    }
  }
  return out;
}

RateProfile build_eta_rates(const EtaSpec& spec) {
  spec.validate();
  RateProfile profile;
  profile.a.resize(spec.k + spec.d - 1);
  profile.b.resize(spec.ell + spec.d - 1);
  for (int i = 1; i <= spec.k + spec.d - 1; ++i)
    profile.a[i - 1] = (i < spec.k) ? 0.0 : -zeta(spec.directions[i - spec.k]);
  for (int j = 1; j <= spec.ell + spec.d - 1; ++j)
    profile.b[j - 1] =
        (j < spec.ell) ? 1.0 : zeta(spec.directions[spec.ell + spec.d - j - 1]);
  return profile;
}

bool eta_zero_cell(const EtaSpec& spec, int i, int j) {
  return i >= spec.k && j >= spec.ell && i + j >= spec.k + spec.ell + spec.d - 1;
}

WeightGrid sample_eta(const EtaSpec& spec, const RngStream& rng) {
  RateProfile profile = build_eta_rates(spec);
  GridBox box = spec.grid();
  WeightGrid out(box);
  for (int j = box.lo.row; j <= box.hi.row; ++j) {
    for (int i = box.lo.col; i <= box.hi.col; ++i) {
      double rate = profile.rate_at(i, j);
      out.at(i, j) =
          rate > 0.0 ? rng.exponential(rate, RngStream::cell_key(i, j)) : 0.0;
    }
  }
  return out;
}

namespace {

WeightGrid sample_line_modified(const std::vector<int>& lines,
                                const std::vector<double>& directions,
                                const GridBox& box, const RngStream& rng,
                                bool columns) {
  if (lines.size() != directions.size())
    throw std::invalid_argument("index list and direction list sizes differ");
  for (std::size_t p = 1; p < lines.size(); ++p) {
    bool ok = columns ? lines[p] > lines[p - 1] : lines[p] < lines[p - 1];
    if (!ok)
      throw std::invalid_argument(columns ? "column list must be strictly increasing"
                                          : "row list must be strictly decreasing");
  }
  if (!box.valid()) throw std::invalid_argument("invalid box");
  WeightGrid out(box);
  for (int j = box.lo.row; j <= box.hi.row; ++j) {
    for (int i = box.lo.col; i <= box.hi.col; ++i) {
      double rate = 1.0;
      int line = columns ? i : j;
      for (std::size_t p = 0; p < lines.size(); ++p) {
        if (lines[p] == line) {
          double z = zeta(directions[p]);
          rate = columns ? 1.0 - z : z;
          break;
        }
      }
      out.at(i, j) = rng.exponential(rate, RngStream::cell_key(i, j));
    }
  }
  return out;
}

}  // namespace

WeightGrid sample_column_modified(const std::vector<int>& cols,
                                  const std::vector<double>& directions,
                                  const GridBox& box, const RngStream& rng) {
  return sample_line_modified(cols, directions, box, rng, /*columns=*/true);
}

WeightGrid sample_row_modified(const std::vector<int>& rows,
                               const std::vector<double>& directions,
                               const GridBox& box, const RngStream& rng) {
  return sample_line_modified(rows, directions, box, rng, /*columns=*/false);
}

}  // namespace lpplab
