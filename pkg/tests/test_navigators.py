import os
import unittest

import numpy as np

from voronav import config as cf
from voronav import constants as cn
from voronav import gridworld, loading, navigators, policy, scenegen
from voronav.config import PlannerConfig
from voronav.gridworld import Action, Pose, SimState
from voronav.semantic_map import frontier_cells

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')


class TestOpenRoom(unittest.TestCase):
    """The target is in view from the start, so every planner drives straight to it."""

    @classmethod
    def setUpClass(cls):
        cls.scene = gridworld.load_scene(os.path.join(FIXTURES, 'open_room.json'))
        super().setUpClass()

    def test_every_method_succeeds(self):
        for method in navigators.NAVIGATORS:
            with self.subTest(method=method):
                trace = navigators.run_episode(self.scene, method=method)
                self.assertTrue(trace.success)
                self.assertIsNone(trace.failure)
                self.assertEqual(trace.actions[-1], 'Stop')
                self.assertEqual(trace.prompts, [])
                self.assertEqual(trace.collisions, 0)
                self.assertAlmostEqual(trace.optimal_length, 1.8)
                self.assertGreaterEqual(trace.path_length, 1.5)
                self.assertLess(trace.path_length, 3.0)
                self.assertEqual(trace.method, method)

    def test_wider_view_radius(self):
        trace = navigators.run_episode(self.scene, PlannerConfig(view_point_radius=1.0))
        self.assertTrue(trace.success)
        self.assertAlmostEqual(trace.optimal_length, 1.0)
        self.assertEqual(trace.config['view_point_radius'], 1.0)

    def test_target_decision_recorded(self):
        trace = navigators.run_episode(self.scene)
        kinds = [record[cn.DECISION_KEYS.SUBGOAL_KIND] for record in trace.decisions]
        self.assertEqual(kinds, [cn.SUBGOAL_KINDS.TARGET])

    def test_validated_records(self):
        trace = navigators.run_episode(self.scene, method=cn.METHODS.FRONTIER)
        cf.validate_traces = True
        try:
            lines = trace.to_jsonl().splitlines()
        finally:
            cf.validate_traces = False
        self.assertEqual(len(lines), len(trace.steps) + len(trace.decisions) + 2)

    def test_unknown_method(self):
        with self.assertRaises(ValueError):
            navigators.run_episode(self.scene, method='teleport')

    def test_baselines(self):
        for run in (navigators.baseline_random, navigators.baseline_frontier, navigators.baseline_voronoi):
            with self.subTest(run=run.__name__):
                self.assertTrue(run(self.scene).success)


class TestStopRule(unittest.TestCase):
    """Stop is issued exactly where the episode would be scored a success."""

    @classmethod
    def setUpClass(cls):
        cls.scene = gridworld.load_scene(os.path.join(FIXTURES, 'open_room.json'))
        super().setUpClass()

    def placed(self, pose):
        navigator = navigators.FrontierNavigator(self.scene)
        navigator.state = SimState(pose=pose, history=(pose,))
        navigator.observe()
        return navigator

    def test_stops_on_view_point(self):
        navigator = self.placed(Pose(2.25, 1.5, 0.0))
        self.assertLess(gridworld.distance_to_goal(self.scene, navigator.state.pose), 0.1)
        self.assertTrue(navigator.success_cells()[navigator.agent_cell])
        self.assertIs(navigator.next_action(), Action.STOP)

    def test_keeps_going_short_of_it(self):
        navigator = self.placed(Pose(2.0, 1.5, 0.0))
        self.assertFalse(navigator.success_cells()[navigator.agent_cell])
        self.assertIs(navigator.next_action(), Action.MOVE_FORWARD)
        navigator.apply(Action.MOVE_FORWARD)
        self.assertIs(navigator.next_action(), Action.STOP)

    def test_map_success_implies_scene_success(self):
        navigator = self.placed(Pose(1.5, 1.5, 0.0))
        scene_success = np.zeros(navigator.map.shape, dtype=bool)
        scene_success[2:-2, 2:-2] = gridworld.success_mask(self.scene.solid, self.scene.goal_mask,
                                                           self.scene.resolution, 0.1)
        accepted = navigator.success_cells()
        self.assertTrue(accepted.any())
        self.assertFalse((accepted & ~scene_success).any())

    def test_settles_on_unconfirmed_cell(self):
        navigator = self.placed(Pose(2.0, 1.5, 0.0))
        for _ in range(cn.LOOKAROUND_TURNS - 1):
            self.assertIs(navigator.settle(), Action.TURN_RIGHT)
        self.assertFalse(navigator.rejected.any())
        navigator.settle()
        self.assertTrue(navigator.rejected[navigator.agent_cell])
        self.assertFalse(navigator.target_cells()[navigator.agent_cell])


class TestFrontierChoice(unittest.TestCase):
    """A walled strip of explored floor: the frontier next to the wall sits in the dilation band."""

    def setUp(self):
        scene = gridworld.load_scene(os.path.join(FIXTURES, 'open_room.json'))
        self.navigator = navigators.RandomNavigator(scene)
        semantic_map = self.navigator.map
        semantic_map.explored[:] = False
        semantic_map.obstacle[:] = False
        semantic_map.categories[:] = False
        semantic_map.explored[11:21, 5:16] = True
        semantic_map.obstacle[11, 5:16] = True
        pose = Pose(0.8, 1.4, 0.0)
        self.navigator.state = SimState(pose=pose, history=(pose,))

    def test_frontier_in_dilation_band(self):
        navigator = self.navigator
        self.assertEqual(navigator.agent_cell, (16, 10))
        field = policy.fmm_field(navigator.map, [navigator.agent_cell], agent_cell=navigator.agent_cell)
        self.assertTrue(frontier_cells(navigator.map)[12, 15])
        self.assertFalse(np.isfinite(field.values[12, 15]))
        frontier = navigator.reachable_frontier()
        self.assertTrue(frontier.cells[12, 15])
        subgoal = navigator.frontier_subgoal(frontier, (12, 15))
        self.assertEqual(subgoal.frontier, (12, 15))
        self.assertTrue(np.isfinite(field.values[subgoal.cell]))
        self.assertTrue(np.isfinite(frontier.distance[12, 15]))

    def test_reached_frontier_is_spent_and_blocks_lift(self):
        navigator = self.navigator
        navigator.blocked[5:8, 5:8] = True
        navigator.on_reached(navigators.Subgoal(cn.SUBGOAL_KINDS.FRONTIER, (14, 15), frontier=(12, 15)))
        self.assertFalse(navigator.blocked.any())
        self.assertTrue(navigator.spent[12, 15])
        self.assertEqual(int(navigator.spent.sum()), 1)
        self.assertFalse(navigator.reachable_frontier().cells[12, 15])
        self.assertTrue(navigator.reachable_frontier().cells[13, 15])

    def test_blocks_lift_before_giving_up(self):
        navigator = self.navigator
        navigator.blocked[:] = True
        self.assertIsNot(navigator.explore(), Action.STOP)
        self.assertFalse(navigator.exhausted)
        # same spot, everything blocked again: nothing new to try
        navigator.subgoal = None
        navigator.blocked[:] = True
        self.assertIs(navigator.explore(), Action.STOP)
        self.assertTrue(navigator.exhausted)


class TestCorridor(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.scene = gridworld.load_scene(os.path.join(FIXTURES, 'corridor_T.json'))
        super().setUpClass()

    def test_deterministic(self):
        config = PlannerConfig(max_steps=60, seed=3)
        first = navigators.run_episode(self.scene, config)
        second = navigators.run_episode(self.scene, config)
        self.assertEqual(first.to_jsonl(), second.to_jsonl())

    def test_starts_with_look_around(self):
        trace = navigators.run_episode(self.scene, PlannerConfig(max_steps=12))
        self.assertEqual(trace.actions, ['TurnRight'] * cn.LOOKAROUND_TURNS)
        self.assertEqual(trace.step_count, 12)
        self.assertFalse(trace.success)
        self.assertIn(trace.failure, (cn.FAILURES.EXPLORATION, cn.FAILURES.PLANNING))

    def test_step_limit(self):
        for method in navigators.NAVIGATORS:
            with self.subTest(method=method):
                trace = navigators.run_episode(self.scene, PlannerConfig(max_steps=40), method=method)
                self.assertLessEqual(trace.step_count, 40)
                self.assertEqual(trace.step_count, len(trace.steps))
                if not trace.success:
                    self.assertIsNotNone(trace.failure)

    def test_random_does_not_give_up_early(self):
        navigator = navigators.RandomNavigator(self.scene)
        trace = navigator.run()
        self.assertFalse(navigator.exhausted and not navigator.target_seen)
        self.assertFalse(trace.failure == cn.FAILURES.EXPLORATION and trace.step_count < 100)

    def test_voronoi_sends_no_prompts(self):
        trace = navigators.run_episode(self.scene, PlannerConfig(max_steps=80), method=cn.METHODS.VORONOI)
        self.assertEqual(trace.prompts, [])
        self.assertEqual(trace.backend, cn.BACKENDS.MOCK)

    def test_without_path_descriptions(self):
        config = PlannerConfig(max_steps=80, use_path_desc=False)
        trace = navigators.run_episode(self.scene, config)
        for record in trace.decisions:
            self.assertIsNone(record[cn.DECISION_KEYS.PATH_PROMPT])
            prompt = record[cn.DECISION_KEYS.DECISION_PROMPT]
            if prompt is not None:
                self.assertNotIn('Path description', prompt)

    def test_decision_records_are_consistent(self):
        trace = navigators.run_episode(self.scene, PlannerConfig(max_steps=80))
        for record in trace.decisions:
            neighbors = record[cn.DECISION_KEYS.NEIGHBORS]
            for key in (cn.DECISION_KEYS.P, cn.DECISION_KEYS.C, cn.DECISION_KEYS.L, cn.DECISION_KEYS.W):
                if record[key]:
                    self.assertEqual(len(record[key]), len(neighbors))
            if record[cn.DECISION_KEYS.SUBGOAL_KIND] == cn.SUBGOAL_KINDS.NODE and record[cn.DECISION_KEYS.W]:
                self.assertIn(record[cn.DECISION_KEYS.CHOSEN], neighbors)


def hidden_target_corridor():
    """The T corridor with the tv moved into a dead-end pocket off the left arm.

    The pocket cannot be seen from the stem or the junction, and the sofa now
    sits along the left arm while the bed stays at the end of the right arm.
    """
    data = loading.load_file(os.path.join(FIXTURES, 'corridor_T.json'))
    grid = np.array(data['grid'])
    grid[grid == 1] = cn.FREE
    grid[grid == 2] = cn.FREE
    grid[9:20, 2:8] = cn.FREE
    grid[18:20, 2:4] = 1
    grid[3:5, 8:11] = 2
    data['grid'] = grid.tolist()
    data['targets'] = [
        {'category': 1, 'cells': [[18, 2], [18, 3], [19, 2], [19, 3]]},
        {'category': 2, 'cells': [[r, c] for r in (3, 4) for c in (8, 9, 10)]},
        data['targets'][1],
    ]
    data['name'] = 'corridor_hidden'
    return gridworld.Scene.from_dict(data)


class TestJunctionDecision(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.scene = hidden_target_corridor()
        cls.trace = navigators.run_episode(cls.scene, PlannerConfig(max_steps=300))
        kinds = cn.SUBGOAL_KINDS
        keys = cn.DECISION_KEYS
        seen = [d[keys.STEP] for d in cls.trace.decisions if d[keys.SUBGOAL_KIND] == kinds.TARGET]
        cls.seen_at = seen[0] if seen else cls.trace.step_count
        cls.node_decisions = [d for d in cls.trace.decisions
                              if d[keys.SUBGOAL_KIND] == kinds.NODE and d[keys.W] and d[keys.STEP] < cls.seen_at]
        super().setUpClass()

    def test_target_starts_hidden(self):
        obs = gridworld.observe(gridworld.initial_state(self.scene), self.scene)
        self.assertFalse((obs.labels == self.scene.goal).any())
        self.assertGreater(self.seen_at, cn.LOOKAROUND_TURNS)

    def test_choices_follow_scores(self):
        keys = cn.DECISION_KEYS
        self.assertTrue(any(len(d[keys.NEIGHBORS]) >= 2 for d in self.node_decisions))
        for record in self.node_decisions:
            W = record[keys.W]
            chosen = record[keys.NEIGHBORS].index(record[keys.CHOSEN])
            self.assertAlmostEqual(W[chosen], max(W))

    def test_turns_toward_the_sofa(self):
        keys = cn.DECISION_KEYS
        junction = next(d for d in self.node_decisions if len(d[keys.NEIGHBORS]) >= 2)
        x0 = 1.95
        after = [s[cn.STEP_KEYS.POSE][0] for s in self.trace.steps
                 if junction[keys.STEP] <= s[cn.STEP_KEYS.STEP] < self.seen_at]
        departures = [x for x in after if abs(x - x0) > 0.6]
        self.assertTrue(departures)
        self.assertLess(departures[0], x0)


class TestGeneratedApartments(unittest.TestCase):
    """Every Stop that does not come from running out of frontier is a success."""

    def check(self, scene, method, max_steps):
        navigator = navigators.NAVIGATORS[method](scene, PlannerConfig(max_steps=max_steps))
        trace = navigator.run()
        if trace.actions and trace.actions[-1] == 'Stop' and not navigator.exhausted:
            self.assertTrue(trace.success)
        if trace.success:
            self.assertEqual(trace.actions[-1], 'Stop')
        return trace

    def test_stop_means_success(self):
        for seed in range(3):
            scene = scenegen.generate_scene(seed, 'apartment', size=5.0, resolution=0.1)
            for method in (cn.METHODS.FRONTIER, cn.METHODS.VORONOI):
                with self.subTest(seed=seed, method=method):
                    self.check(scene, method, 200)

    @unittest.skipUnless(os.environ.get('VORONAV_SLOW_TESTS') == '1', 'set VORONAV_SLOW_TESTS=1 to run')
    def test_stop_means_success_full_resolution(self):
        for seed in (6, 16):
            scene = scenegen.generate_scene(seed, 'apartment')
            for method in (cn.METHODS.VORONOI, cn.METHODS.VORONAV):
                with self.subTest(seed=seed, method=method):
                    self.check(scene, method, 500)


if __name__ == '__main__':
    unittest.main()
