/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <set>
#include <vector>

#include "invsyn/bexpr.hpp"
#include "invsyn/linatom.hpp"

namespace invsyn {

struct QeOptions {
  size_t cube_cap = 50000;  // hard limit on DNF growth during elimination
  bool simplify = true;     // duplicate / implied-bound removal on outputs
};

// A conjunction of linear atoms; one DNF disjunct inside the engines.
using AtomCube = std::vector<LinAtom>;

// --- per-sort engines (single-sorted atom cubes) -----------------------------

// Fourier–Motzkin with equality substitution first.  Total; output cubes are
// over the remaining pseudo-variables only.  Disequations split the cube, so
// the result is a disjunction.
std::vector<AtomCube> eliminate_lra(const Ctx & ctx, const AtomCube & cube,
                                    const std::set<TermId> & targets,
                                    const QeOptions & opt = {});

// Cooper's method, per cube; may emit divisibility atoms over kept variables.
std::vector<AtomCube> eliminate_lia(const Ctx & ctx, const AtomCube & cube,
                                    const std::set<TermId> & targets,
                                    const QeOptions & opt = {});

// --- combined front end over literals ----------------------------------------

// Eliminates the target pseudo-variables from one conjunction of literals.
// Literals are partitioned by sort (atoms are single-sorted by construction);
// each arithmetic part goes to its engine, uninterpreted-sort literals pass
// through untouched but must not mention a target.  Returns a disjunction of
// conjunctions equivalent to ∃targets.cube modulo the combined theory.
std::vector<Cube> eliminate_cube(Ctx & ctx, const Cube & cube,
                                 const std::set<TermId> & targets,
                                 const QeOptions & opt = {});

// DNF in, DNF out; disjuncts processed and emitted in input order.
std::vector<Cube> eliminate_dnf(Ctx & ctx, const std::vector<Cube> & dnf,
                                const std::set<TermId> & targets,
                                const QeOptions & opt = {});

// Cheap cube-level cleanup over atoms: normalizes, drops True, detects ground
// contradictions and contradicting bounds on identical bodies.  Returns false
// if the cube is unsatisfiable on its face.
bool simplify_atom_cube(const Ctx & ctx, AtomCube & cube);

}  // namespace invsyn
