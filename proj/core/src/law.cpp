#include "rchaos/law.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rchaos {

RademacherLaw::RademacherLaw(std::vector<double> probs) : p_(std::move(probs)) {
  if (p_.empty()) throw InputError("RademacherLaw: need at least one coordinate");
  for (double pk : p_)
    if (!(pk > 0.0 && pk < 1.0))
      throw InputError("RademacherLaw: every p_k must lie in (0,1)");
}

RademacherLaw RademacherLaw::symmetric(int n) {
  if (n < 1) throw InputError("RademacherLaw::symmetric: n must be >= 1");
  return RademacherLaw(std::vector<double>(n, 0.5));
}

double RademacherLaw::y_plus(int k) const {
  const double pk = p(k);
  return std::sqrt((1.0 - pk) / pk);
}

double RademacherLaw::y_minus(int k) const {
  const double pk = p(k);
  return -std::sqrt(pk / (1.0 - pk));
}

double RademacherLaw::normalized_value(int k, int sign) const {
  if (sign != 1 && sign != -1)
    throw InputError("RademacherLaw::normalized_value: sign must be +1 or -1");
  return sign == 1 ? y_plus(k) : y_minus(k);
}

bool RademacherLaw::is_symmetric(double tol) const {
  for (double pk : p_)
    if (std::abs(pk - 0.5) > tol) return false;
  return true;
}

RademacherLaw RademacherLaw::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("RademacherLaw::load: cannot open " + path);
  std::vector<double> probs;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double pk;
    if (ls >> pk) probs.push_back(pk);
  }
  return RademacherLaw(std::move(probs));
}

void RademacherLaw::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw InputError("RademacherLaw::save: cannot open " + path);
  char buf[64];
  for (double pk : p_) {
    std::snprintf(buf, sizeof(buf), "%.17g", pk);
    os << buf << "\n";
  }
}

}  // namespace rchaos
