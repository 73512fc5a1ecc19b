#pragma once

// Mapping tori of free-group automorphisms as explicit presentations, with
// exact equality via the semidirect normal form g t^k, verification of
// fiber-and-orientation preserving isomorphism candidates, and the
// peripheral bookkeeping (which supplied invariant subgroups are tori or
// Klein bottles, and whether everything polynomial is rank one).

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "f3conj/automorphism.hpp"
#include "f3conj/subgroup_graph.hpp"
#include "f3conj/word.hpp"

namespace f3conj {

// F_n x|_phi Z, generators a_1..a_n, t = generator n+1, relations
// t^-1 a_i t = a_i phi.
struct MappingTorusPresentation {
  int fiber_rank = 0;
  FreeMap monodromy;
  std::vector<Word> relators;
};

inline MappingTorusPresentation build_mapping_torus(const FreeMap& phi) {
  if (!is_automorphism(phi))
    throw std::invalid_argument("monodromy must be invertible");
  MappingTorusPresentation p;
  p.fiber_rank = phi.rank();
  p.monodromy = phi;
  const Letter t = phi.rank() + 1;
  for (int i = 1; i <= phi.rank(); ++i) {
    Word r({-t});
    r.push(i);
    r.push(t);
    r.append(phi.image(i).inverse());
    p.relators.push_back(r);
  }
  return p;
}

// Unique normal form g t^k with g in the fiber. The scan accumulates the
// value as t^k h (a t-crossing twists the running fiber word through the
// monodromy), then commutes the power back out via t^k h = (h phi^-k) t^k.
struct TorusElement {
  Word g;
  int64_t k = 0;

  bool operator==(const TorusElement& o) const { return k == o.k && g == o.g; }
};

inline TorusElement torus_normal_form(const MappingTorusPresentation& p,
                                      const Word& w) {
  const Letter t = p.fiber_rank + 1;
  FreeMap inv = inverse(p.monodromy);
  int64_t k = 0;
  Word h;
  for (Letter x : w.letters()) {
    if (x == t) {
      k += 1;
      h = p.monodromy.apply(h);
    } else if (x == -t) {
      k -= 1;
      h = inv.apply(h);
    } else {
      h.push(x);
    }
  }
  TorusElement e;
  e.k = k;
  e.g = h;
  const FreeMap& back = k >= 0 ? inv : p.monodromy;
  for (int64_t i = 0; i < (k >= 0 ? k : -k); ++i) e.g = back.apply(e.g);
  return e;
}

inline bool torus_equal(const MappingTorusPresentation& p, const Word& w1,
                        const Word& w2) {
  return torus_normal_form(p, w1) == torus_normal_form(p, w2);
}

struct TorusIsoCheck {
  bool valid = false;
  std::vector<std::string> failures;
  FreeMap fiber_map;  // the restriction to the fiber, when it is one
};

// Verifies a candidate isomorphism G x|_phi <t> -> G x|_psi <t> given by
// images of the fiber generators and of t: the fiber must map onto the
// fiber, t into the coset tG, and every defining relator must die in the
// target. Words live in rank n+1.
inline TorusIsoCheck check_standard_iso(const MappingTorusPresentation& src,
                                        const MappingTorusPresentation& dst,
                                        const std::vector<Word>& fiber_images,
                                        const Word& t_image) {
  TorusIsoCheck out;
  out.fiber_map = FreeMap::identity(src.fiber_rank);
  if (src.fiber_rank != dst.fiber_rank ||
      static_cast<int>(fiber_images.size()) != src.fiber_rank) {
    out.failures.push_back("rank mismatch");
    return out;
  }
  std::vector<Word> restricted;
  for (int i = 0; i < src.fiber_rank; ++i) {
    TorusElement e = torus_normal_form(dst, fiber_images[i]);
    if (e.k != 0) {
      out.failures.push_back("fiber generator " + std::to_string(i + 1) +
                             " leaves the fiber");
      return out;
    }
    restricted.push_back(e.g);
  }
  FreeMap f(src.fiber_rank, restricted);
  if (!is_automorphism(f))
    out.failures.push_back("restriction is not onto the fiber");
  if (torus_normal_form(dst, t_image).k != 1)
    out.failures.push_back("t does not map into the coset tG");

  // Candidate as a letter substitution on rank n+1, then relator images.
  std::vector<Word> sub = fiber_images;
  sub.push_back(t_image);
  FreeMap cand(src.fiber_rank + 1, sub);
  for (const Word& r : src.relators) {
    TorusElement e = torus_normal_form(dst, cand.apply(r));
    if (e.k != 0 || !e.g.empty()) {
      out.failures.push_back("relator " + to_string(r) + " survives");
      break;
    }
  }
  out.valid = out.failures.empty();
  if (out.valid) out.fiber_map = f;
  return out;
}

enum class PeripheralKind { torus, klein, higher_rank };

struct PeripheralEntry {
  PeripheralKind kind = PeripheralKind::higher_rank;
  int rank = 0;
  int period = 0;    // least power of the monodromy fixing the class
  Word axis;         // rank-one generator
  Word witness;      // conj(axis^sign, witness) == (axis) phi^period
};

struct PeripheralProfile {
  bool almost_toral = false;  // every candidate is rank one
  std::vector<PeripheralEntry> entries;
};

// Classifies supplied peripheral candidates: a rank-one subgroup whose
// class returns to itself after `period` steps closes up to Z x Z when the
// orientation is preserved and to a Klein bottle when reversed. This
// verifies candidates, it does not find them.
inline PeripheralProfile classify_peripherals(
    const FreeMap& phi, const std::vector<std::vector<Word>>& candidates,
    int max_period = 6) {
  PeripheralProfile prof;
  prof.almost_toral = true;
  for (const std::vector<Word>& gens : candidates) {
    SubgroupGraph h(phi.rank(), gens);
    PeripheralEntry e;
    e.rank = h.rank();
    if (h.rank() != 1) {
      e.kind = PeripheralKind::higher_rank;
      prof.almost_toral = false;
      prof.entries.push_back(e);
      continue;
    }
    e.axis = h.basis().front();
    Word img = e.axis;
    bool matched = false;
    for (int m = 1; m <= max_period && !matched; ++m) {
      if (img.size() > 60000) break;  // exponential axis, never periodic
      img = phi.apply(img);
      if (auto w = conjugate_in_free(e.axis, img)) {
        e.kind = PeripheralKind::torus;
        e.period = m;
        e.witness = *w;
        matched = true;
      } else if (auto w2 = conjugate_in_free(e.axis.inverse(), img)) {
        e.kind = PeripheralKind::klein;
        e.period = m;
        e.witness = *w2;
        matched = true;
      }
    }
    if (!matched) {
      e.kind = PeripheralKind::higher_rank;  // not periodic within budget
      prof.almost_toral = false;
    }
    prof.entries.push_back(e);
  }
  return prof;
}

}  // namespace f3conj
