#ifndef WLAP_H
#define WLAP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WlapStatus {
  WLAP_STATUS_OK = 0,
  WLAP_STATUS_INVALID_ARGUMENT = 1,
  WLAP_STATUS_PARSE = 2,
  WLAP_STATUS_SOLVER = 3,
  WLAP_STATUS_IO = 4,
  WLAP_STATUS_DISCONNECTED = 5,
  WLAP_STATUS_PANIC = 6,
} WlapStatus;

typedef enum WlapStrategy {
  WLAP_STRATEGY_RANDOM = 0,
  WLAP_STRATEGY_REGION_GROWING = 1,
  WLAP_STRATEGY_SPECTRAL = 2,
  WLAP_STRATEGY_WEIGHTED_SPECTRAL = 3,
} WlapStrategy;

// Opaque graph handle.
typedef struct WlapGraph WlapGraph;

// Opaque partition handle with the metrics of the run that produced it.
typedef struct WlapPartition WlapPartition;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer is
// valid until the next failing call on the same thread.
const char *wlap_last_error_message(void);

// Parses a NUL-terminated METIS graph.
//
// # Safety
// `text` must be a valid NUL-terminated string and `out` a writable pointer.
enum WlapStatus wlap_graph_parse_metis(const char *text, struct WlapGraph **out);

// Reads a METIS graph file.
//
// # Safety
// `path` must be a valid NUL-terminated string and `out` a writable pointer.
enum WlapStatus wlap_graph_read_metis(const char *path, struct WlapGraph **out);

// Builds a graph from 0-based compressed rows. Both directions of every edge
// must be listed. `adjwgt` and `vwgt` may be NULL for unit weights.
//
// # Safety
// `xadj` must hold `n + 1` entries, `adjncy` and `adjwgt` (if non-NULL)
// `xadj[n]` entries, `vwgt` (if non-NULL) `n` entries.
enum WlapStatus wlap_graph_from_csr(size_t n,
                                    const size_t *xadj,
                                    const size_t *adjncy,
                                    const double *adjwgt,
                                    const double *vwgt,
                                    struct WlapGraph **out);

// # Safety
// `g` must be NULL or a handle from this library that was not freed yet.
void wlap_graph_free(struct WlapGraph *g);

// Vertex count, or 0 for a NULL handle.
//
// # Safety
// `g` must be NULL or a live graph handle.
size_t wlap_graph_vertex_count(const struct WlapGraph *g);

// Undirected edge count (a self-loop counts once), or 0 for a NULL handle.
//
// # Safety
// `g` must be NULL or a live graph handle.
size_t wlap_graph_edge_count(const struct WlapGraph *g);

// Partitions a connected graph into `k` blocks with the multilevel
// pipeline. `strategy` is one of the `WlapStrategy` values;
// `threshold == 0` and a negative `epsilon` select the defaults.
//
// # Safety
// `g` must be a live graph handle and `out` a writable pointer.
enum WlapStatus wlap_partition(const struct WlapGraph *g,
                               size_t k,
                               uint32_t strategy,
                               uint64_t seed,
                               size_t threshold,
                               double epsilon,
                               struct WlapPartition **out);

// # Safety
// `p` must be NULL or a handle from this library that was not freed yet.
void wlap_partition_free(struct WlapPartition *p);

// Number of vertices covered, or 0 for a NULL handle.
//
// # Safety
// `p` must be NULL or a live partition handle.
size_t wlap_partition_len(const struct WlapPartition *p);

// Block count, or 0 for a NULL handle.
//
// # Safety
// `p` must be NULL or a live partition handle.
size_t wlap_partition_k(const struct WlapPartition *p);

// Copies the block ids into `buffer`, which must hold exactly
// `wlap_partition_len(p)` entries.
//
// # Safety
// `p` must be a live partition handle and `buffer` writable for `len` entries.
enum WlapStatus wlap_partition_copy(const struct WlapPartition *p, size_t *buffer, size_t len);

// Normalized cut of the partition on the input graph; NaN for NULL.
//
// # Safety
// `p` must be NULL or a live partition handle.
double wlap_partition_ncut(const struct WlapPartition *p);

// Weighted cut of the initial clustering on the coarsest graph; NaN for NULL.
//
// # Safety
// `p` must be NULL or a live partition handle.
double wlap_partition_coarse_wcut(const struct WlapPartition *p);

// Total weight of cut edges; NaN for NULL.
//
// # Safety
// `p` must be NULL or a live partition handle.
double wlap_partition_edge_cut(const struct WlapPartition *p);

// Normalized cut of an arbitrary assignment with every block nonempty.
//
// # Safety
// `g` must be a live graph handle, `assignment` readable for `n` entries and
// `out` writable.
enum WlapStatus wlap_graph_ncut(const struct WlapGraph *g,
                                const size_t *assignment,
                                size_t n,
                                size_t k,
                                double *out);

// Weighted cut (by the graph's vertex weights) of an assignment.
//
// # Safety
// Same as [`wlap_graph_ncut`].
enum WlapStatus wlap_graph_wcut(const struct WlapGraph *g,
                                const size_t *assignment,
                                size_t n,
                                size_t k,
                                double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WLAP_H */
