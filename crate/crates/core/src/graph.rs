//! Strongly connected components of small directed graphs given as adjacency lists.
//!
//! Tarjan's algorithm, written with an explicit call stack so that pair graphs with
//! tens of thousands of vertices do not exhaust the thread stack.

/// Returns the strongly connected components of `adj` in reverse topological order
/// (sink components first). Vertices inside each component are sorted ascending.
pub fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;

    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next_index = 0;

    // (vertex, position of the next neighbour to look at)
    let mut call_stack: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call_stack.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(frame) = call_stack.last_mut() {
            let v = frame.0;
            if let Some(&w) = adj[v].get(frame.1) {
                frame.1 += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call_stack.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
                continue;
            }

            call_stack.pop();
            if let Some(&(parent, _)) = call_stack.last() {
                lowlink[parent] = lowlink[parent].min(lowlink[v]);
            }
            if lowlink[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                component.sort_unstable();
                components.push(component);
            }
        }
    }

    components
}

/// True when every vertex can reach every other vertex.
pub fn is_strongly_connected(adj: &[Vec<usize>]) -> bool {
    adj.is_empty() || strongly_connected_components(adj).len() == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_has_singleton_components() {
        let adj = vec![vec![1], vec![2], vec![]];
        let sccs = strongly_connected_components(&adj);
        assert_eq!(sccs, vec![vec![2], vec![1], vec![0]]);
    }

    #[test]
    fn cycle_with_tail() {
        // 0 -> 1 -> 2 -> 1, 2 -> 3
        let adj = vec![vec![1], vec![2], vec![1, 3], vec![]];
        let sccs = strongly_connected_components(&adj);
        assert_eq!(sccs, vec![vec![3], vec![1, 2], vec![0]]);
        assert!(!is_strongly_connected(&adj));
    }

    #[test]
    fn long_cycle_does_not_overflow() {
        let n = 200_000;
        let adj: Vec<Vec<usize>> = (0..n).map(|v| vec![(v + 1) % n]).collect();
        assert!(is_strongly_connected(&adj));
    }
}
