#include "toricgw/novikov.hpp"

namespace toricgw {

std::vector<Deg> nov_support_closure(const std::vector<Deg>& gens,
                                     const NovCtx& ctx) {
  std::set<Deg> seen;
  Deg z = ctx.zero();
  seen.insert(z);
  std::vector<Deg> frontier{z};
  while (!frontier.empty()) {
    std::vector<Deg> next;
    for (const Deg& d : frontier) {
      for (const Deg& g : gens) {
        Deg nd = deg_add(d, g);
        if (ctx.weight(nd) > ctx.cutoff) continue;
        if (seen.insert(nd).second) next.push_back(nd);
      }
    }
    frontier = std::move(next);
  }
  std::vector<Deg> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end(), [&ctx](const Deg& a, const Deg& b) {
    long wa = ctx.weight(a), wb = ctx.weight(b);
    if (wa != wb) return wa < wb;
    return a < b;
  });
  return out;
}

}  // namespace toricgw
