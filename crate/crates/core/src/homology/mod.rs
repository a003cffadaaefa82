//! Z/2 simplicial homology: Betti numbers, bases, induced maps, barycentric
//! subdivision and composite ranks along towers of complexes.

mod chain;
mod maps;
mod matrix;
mod subdivision;
mod tower;

pub use chain::{add_into, betti, boundary_columns, boundary_rank, Chain, Homology};
pub use maps::{induced_map, induced_map_of, InducedMap};
pub use matrix::Z2Matrix;
pub use subdivision::{barycentric_subdivision, carrier_map_to_nerve, last_vertex_map, Subdivision};
pub use tower::{
    find_plateau, ranks_from_steps, tower_ranks, Direction, HomologyTower, Plateau, StageSummary, TowerReport,
    PLATEAU_LENGTH,
};
