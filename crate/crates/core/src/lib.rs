pub mod adaptive;
pub mod dp;
pub mod interval;
pub mod poset;
pub mod uav;
pub mod uncertainty;
