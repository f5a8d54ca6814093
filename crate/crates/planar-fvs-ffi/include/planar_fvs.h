/* C interface for the planar-fvs feedback vertex set toolkit.
 *
 * All handles are opaque and owned by the library: graphs are released with
 * pfvs_graph_free, solutions with pfvs_solution_free. Fallible calls return a
 * PFVS_* status code and write results through out-parameters; out-parameters
 * are only written on PFVS_OK.
 */

#ifndef PLANAR_FVS_H
#define PLANAR_FVS_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define PFVS_OK 0
#define PFVS_NULL_ARGUMENT (-1)
#define PFVS_INVALID_ARGUMENT (-2)
#define PFVS_NOT_PLANAR (-3)
#define PFVS_TIMEOUT (-4)
#define PFVS_INFEASIBLE (-5)
#define PFVS_PARSE_ERROR (-6)
#define PFVS_PANIC (-7)

/* PTAS variants for pfvs_solve_ptas. */
#define PFVS_PTAS_VANILLA 0
#define PFVS_PTAS_MINIMAL 1
#define PFVS_PTAS_OPTIMIZED 2

typedef struct PfvsGraph PfvsGraph;
typedef struct PfvsSolution PfvsSolution;

/* Graph construction */
PfvsGraph *pfvs_graph_new(void);
void pfvs_graph_free(PfvsGraph *g);
int32_t pfvs_graph_add_vertex(PfvsGraph *g, uint32_t *out_id);
/* Creates missing endpoints; parallel edges beyond multiplicity two and
 * repeated self-loops are rejected with PFVS_INVALID_ARGUMENT. */
int32_t pfvs_graph_add_edge(PfvsGraph *g, uint32_t u, uint32_t v);
/* Parses the `u v`-per-line edge list format (# comments, blank lines). */
int32_t pfvs_graph_parse(const char *text, PfvsGraph **out);
uint64_t pfvs_graph_vertex_count(const PfvsGraph *g);
uint64_t pfvs_graph_edge_count(const PfvsGraph *g);

/* Solvers */
int32_t pfvs_solve_two_approx(const PfvsGraph *g, PfvsSolution **out);
int32_t pfvs_solve_exact(const PfvsGraph *g, uint64_t budget_ms, PfvsSolution **out);
int32_t pfvs_solve_ptas(const PfvsGraph *g, uint64_t r, int32_t variant,
                        uint64_t leaf_budget_ms, PfvsSolution **out);
int32_t pfvs_solve_hybrid(const PfvsGraph *g, uint64_t frequency, PfvsSolution **out);

/* Solutions */
uint64_t pfvs_solution_len(const PfvsSolution *s);
/* Vertex ids are reported in increasing order. */
int32_t pfvs_solution_get(const PfvsSolution *s, uint64_t index, uint32_t *out);
/* Independent feasibility check: *out_feasible becomes 1 iff removing the
 * solution leaves g acyclic. */
int32_t pfvs_verify(const PfvsGraph *g, const PfvsSolution *s, int32_t *out_feasible);
void pfvs_solution_free(PfvsSolution *s);

#ifdef __cplusplus
}
#endif

#endif /* PLANAR_FVS_H */
