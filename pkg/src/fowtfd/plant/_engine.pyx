# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=False
"""Compiled scenario stepping loop.

Line-for-line mirror of engine_py.run_loop; compiled with FP contraction
disabled so both engines produce bit-identical traces.
"""

from libc.math cimport exp

from ._packing import PAR_INDEX

ENGINE_NAME = "cython"

cdef double RAD2DEG = 57.29577951308232


def run_loop(double[::1] par, double[::1] x, double z0, Py_ssize_t nsteps,
             double[::1] wind, double[:, ::1] eta_x, double[:, ::1] eta_y,
             u_extra_obj,
             double[::1] fault_mag, long long[::1] fault_k0, long long[::1] fault_k1,
             double[:, ::1] u_out, double[:, ::1] y_out, x_out_obj):
    idx = PAR_INDEX
    cdef double dt = par[idx["dt"]]
    cdef double rho_air = par[idx["rho_air"]]
    cdef double rotor_area = par[idx["rotor_area"]]
    cdef double rotor_radius = par[idx["rotor_radius"]]
    cdef double cp_c1 = par[idx["cp_c1"]]
    cdef double cp_c2 = par[idx["cp_c2"]]
    cdef double cp_c3 = par[idx["cp_c3"]]
    cdef double cp_c4 = par[idx["cp_c4"]]
    cdef double cp_c5 = par[idx["cp_c5"]]
    cdef double cp_c6 = par[idx["cp_c6"]]
    cdef double ct_lin = par[idx["ct_lin"]]
    cdef double ct_pitch = par[idx["ct_pitch"]]
    cdef double ct_min = par[idx["ct_min"]]
    cdef double ct_max = par[idx["ct_max"]]
    cdef double blade_stiffness = par[idx["blade_stiffness"]]
    cdef double blade_torque_loss = par[idx["blade_torque_loss"]]
    cdef double blade_thrust_loss = par[idx["blade_thrust_loss"]]
    cdef double gear_ratio = par[idx["gear_ratio"]]
    cdef double rotor_inertia = par[idx["rotor_inertia"]]
    cdef double gen_inertia = par[idx["gen_inertia"]]
    cdef double shaft_damping = par[idx["shaft_damping"]]
    cdef double surge_mass = par[idx["surge_mass"]]
    cdef double surge_damping = par[idx["surge_damping"]]
    cdef double moor_k_inner = par[idx["moor_k_inner"]]
    cdef double moor_k_outer = par[idx["moor_k_outer"]]
    cdef double moor_knee = par[idx["moor_knee"]]
    cdef double moor_relax_time = par[idx["moor_relax_time"]]
    cdef double pitch_inertia = par[idx["pitch_inertia"]]
    cdef double pitch_stiffness = par[idx["pitch_stiffness"]]
    cdef double pitch_damping = par[idx["pitch_damping"]]
    cdef double thrust_arm = par[idx["thrust_arm"]]
    cdef double tower_mass = par[idx["tower_mass"]]
    cdef double tower_stiffness = par[idx["tower_stiffness"]]
    cdef double tower_damping = par[idx["tower_damping"]]
    cdef double hub_height = par[idx["hub_height"]]
    cdef double act_omega = par[idx["pitch_act_omega"]]
    cdef double act_zeta = par[idx["pitch_act_zeta"]]
    cdef double pitch_lo = par[idx["pitch_min"]]
    cdef double pitch_hi = par[idx["pitch_max"]]
    cdef double torque_tau = par[idx["torque_act_tau"]]
    cdef double torque_lo = par[idx["torque_min"]]
    cdef double torque_hi = par[idx["torque_max"]]
    cdef double kp = par[idx["ctrl_pitch_kp"]]
    cdef double ki = par[idx["ctrl_pitch_ki"]]
    cdef double int_lim = par[idx["ctrl_int_limit"]]
    cdef double rated_gen = par[idx["rated_gen_speed"]]
    cdef double rated_torque = par[idx["rated_torque"]]
    cdef double k_law = par[idx["torque_law_gain"]]
    cdef double pitch_ff = par[idx["pitch_feedforward"]]
    cdef double torque_ff = par[idx["torque_feedforward"]]
    cdef bint open_loop = par[idx["open_loop"]] > 0.5
    cdef bint pitch_loop_on = par[idx["pitch_loop_on"]] > 0.5
    cdef double power_gain = par[idx["power_gain"]]
    cdef double rated_power = par[idx["rated_power"]]
    cdef double bend_gain = par[idx["bend_gain"]]
    cdef double bend_aux_gain = par[idx["bend_aux_gain"]]
    cdef double bend_aux_pitch_gain = par[idx["bend_aux_pitch_gain"]]
    cdef double b_eq = par[idx["tower_defl_eq"]]
    cdef double f10_km = par[idx["fairlead_km_scale"]]
    cdef double f10_shift = par[idx["fairlead_neutral_shift"]]
    cdef double f10_tm = par[idx["fairlead_tower_m_scale"]]
    cdef double f10_td = par[idx["fairlead_tower_d_scale"]]
    cdef double f11_per_len = par[idx["anchor_shift_per_length"]]
    cdef double f11_tm = par[idx["anchor_tower_m_scale"]]
    cdef double f11_td = par[idx["anchor_tower_d_scale"]]

    cdef double s = x[0]
    cdef double ds = x[1]
    cdef double phi = x[2]
    cdef double dphi = x[3]
    cdef double b = x[4]
    cdef double db = x[5]
    cdef double wr = x[6]
    cdef double wg = x[7]
    cdef double th = x[8]
    cdef double dth = x[9]
    cdef double tg = x[10]
    cdef double xm = x[11]
    cdef double z = z0

    cdef bint have_extra = u_extra_obj is not None
    cdef bint store_states = x_out_obj is not None
    cdef double[:, ::1] u_extra
    cdef double[:, ::1] x_out
    if have_extra:
        u_extra = u_extra_obj
    if store_states:
        x_out = x_out_obj

    cdef Py_ssize_t k
    cdef bint a_f1, a_f2, a_f3, a_f4, a_f5, a_f6, a_f7, a_f8, a_f9, a_f10, a_f11
    cdef double y0, y1, y2, y3, y4, y5, y6, y7, y8, y9
    cdef double werr, u1, u2, pitch_drive, torque_target, blade_scale
    cdef double km_scale, neutral, tower_m_scale, tower_d_scale
    cdef double v, wre, lam, pitch_deg, li, lam_i, cp, ct, q
    cdef double thrust0, torque0, defl, rel, q_torque, q_thrust, torque_a, thrust
    cdef double dm, f_m, slip, t_shaft
    cdef double acc_s, acc_phi, acc_b, dwr, dwg, acc_th, dtg, dxm

    for k in range(nsteps):
        a_f1 = fault_k0[0] <= k < fault_k1[0]
        a_f2 = fault_k0[1] <= k < fault_k1[1]
        a_f3 = fault_k0[2] <= k < fault_k1[2]
        a_f4 = fault_k0[3] <= k < fault_k1[3]
        a_f5 = fault_k0[4] <= k < fault_k1[4]
        a_f6 = fault_k0[5] <= k < fault_k1[5]
        a_f7 = fault_k0[6] <= k < fault_k1[6]
        a_f8 = fault_k0[7] <= k < fault_k1[7]
        a_f9 = fault_k0[8] <= k < fault_k1[8]
        a_f10 = fault_k0[9] <= k < fault_k1[9]
        a_f11 = fault_k0[10] <= k < fault_k1[10]

        y0 = th; y1 = th; y2 = th
        y3 = tg
        y4 = wr
        y5 = wg
        y6 = rated_power + power_gain * (wg - rated_gen) + rated_gen * (tg - rated_torque)
        y7 = bend_gain * b
        y8 = bend_aux_gain * b + bend_aux_pitch_gain * phi
        y9 = (tower_stiffness * (b_eq - b) - tower_damping * db) / tower_mass

        if a_f1:
            y5 = y5 * fault_mag[0]
        if a_f2:
            y6 = y6 * fault_mag[1]
        if a_f3:
            y7 = y7 + fault_mag[2]
        if a_f4:
            y4 = y4 * fault_mag[3]
        if a_f8:
            y3 = y3 * fault_mag[7]

        y0 += eta_y[k, 0]; y1 += eta_y[k, 1]; y2 += eta_y[k, 2]
        y3 += eta_y[k, 3]; y4 += eta_y[k, 4]; y5 += eta_y[k, 5]
        y6 += eta_y[k, 6]; y7 += eta_y[k, 7]; y8 += eta_y[k, 8]
        y9 += eta_y[k, 9]

        if a_f7:
            y0 = fault_mag[6]; y1 = fault_mag[6]; y2 = fault_mag[6]

        y_out[k, 0] = y0; y_out[k, 1] = y1; y_out[k, 2] = y2
        y_out[k, 3] = y3; y_out[k, 4] = y4; y_out[k, 5] = y5
        y_out[k, 6] = y6; y_out[k, 7] = y7; y_out[k, 8] = y8
        y_out[k, 9] = y9

        if open_loop:
            u1 = pitch_ff
            u2 = torque_ff
        else:
            if pitch_loop_on:
                werr = y5 - rated_gen
                z = z + dt * werr
                if z > int_lim:
                    z = int_lim
                elif z < -int_lim:
                    z = -int_lim
                u1 = pitch_ff + kp * werr + ki * z
            else:
                u1 = pitch_ff
            u2 = k_law * y5 * y5
            if u2 > rated_torque:
                u2 = rated_torque
        if have_extra:
            u1 = u1 + u_extra[k, 0]
            u2 = u2 + u_extra[k, 1]
        if u1 < pitch_lo:
            u1 = pitch_lo
        elif u1 > pitch_hi:
            u1 = pitch_hi
        if u2 < torque_lo:
            u2 = torque_lo
        elif u2 > torque_hi:
            u2 = torque_hi
        u_out[k, 0] = u1
        u_out[k, 1] = u2

        pitch_drive = fault_mag[4] if a_f5 else u1
        torque_target = u2 + fault_mag[5] if a_f6 else u2
        blade_scale = fault_mag[8] if a_f9 else 1.0
        km_scale = 1.0
        neutral = 0.0
        tower_m_scale = 1.0
        tower_d_scale = 1.0
        if a_f10:
            km_scale = km_scale * f10_km
            neutral = neutral + f10_shift
            tower_m_scale = tower_m_scale * f10_tm
            tower_d_scale = tower_d_scale * f10_td
        if a_f11:
            neutral = neutral + f11_per_len * fault_mag[10]
            tower_m_scale = tower_m_scale * f11_tm
            tower_d_scale = tower_d_scale * f11_td

        v = wind[k] - ds - hub_height * dphi - db
        if v < 1.0:
            v = 1.0
        wre = wr if wr > 0.1 else 0.1
        lam = wre * rotor_radius / v
        pitch_deg = th * RAD2DEG
        if pitch_deg < 0.0:
            pitch_deg = 0.0
        li = 1.0 / (lam + 0.08 * pitch_deg) - 0.035 / (pitch_deg * pitch_deg * pitch_deg + 1.0)
        if li <= 1e-6:
            cp = 0.0
        else:
            lam_i = 1.0 / li
            cp = cp_c1 * (cp_c2 / lam_i - cp_c3 * pitch_deg - cp_c4) * exp(-cp_c5 / lam_i) \
                + cp_c6 * lam
            if cp < 0.0:
                cp = 0.0
            elif cp > 0.593:
                cp = 0.593
        ct = ct_lin * lam * exp(-ct_pitch * pitch_deg)
        if ct < ct_min:
            ct = ct_min
        elif ct > ct_max:
            ct = ct_max
        q = 0.5 * rho_air * rotor_area * v * v
        thrust0 = q * ct
        torque0 = q * v * cp / wre
        defl = thrust0 / (3.0 * blade_stiffness * blade_scale)
        rel = defl / rotor_radius
        q_torque = 1.0 - blade_torque_loss * rel
        q_thrust = 1.0 - blade_thrust_loss * rel
        if q_torque < 0.0:
            q_torque = 0.0
        if q_thrust < 0.0:
            q_thrust = 0.0
        torque_a = torque0 * q_torque
        thrust = thrust0 * q_thrust

        dm = s - xm
        f_m = moor_k_inner * dm
        if dm > moor_knee:
            f_m += moor_k_outer * (dm - moor_knee)
        elif dm < -moor_knee:
            f_m += moor_k_outer * (dm + moor_knee)
        f_m = -f_m * km_scale

        slip = wr - wg / gear_ratio
        t_shaft = shaft_damping * slip

        acc_s = (thrust + f_m - surge_damping * ds) / surge_mass
        acc_phi = (thrust * thrust_arm - pitch_stiffness * phi - pitch_damping * dphi) \
            / pitch_inertia
        acc_b = (thrust - tower_stiffness * b - tower_damping * tower_d_scale * db) \
            / (tower_mass * tower_m_scale)
        dwr = (torque_a - t_shaft) / rotor_inertia
        dwg = (t_shaft / gear_ratio - tg) / gen_inertia
        acc_th = act_omega * act_omega * (pitch_drive - th) - 2.0 * act_zeta * act_omega * dth
        dtg = (torque_target - tg) / torque_tau
        dxm = (neutral - xm) / moor_relax_time

        s = s + dt * ds
        ds = ds + dt * acc_s + eta_x[k, 1]
        phi = phi + dt * dphi
        dphi = dphi + dt * acc_phi + eta_x[k, 3]
        b = b + dt * db
        db = db + dt * acc_b + eta_x[k, 5]
        wr = wr + dt * dwr + eta_x[k, 6]
        wg = wg + dt * dwg + eta_x[k, 7]
        th = th + dt * dth
        dth = dth + dt * acc_th + eta_x[k, 9]
        tg = tg + dt * dtg + eta_x[k, 10]
        xm = xm + dt * dxm

        if store_states:
            x_out[k, 0] = s; x_out[k, 1] = ds; x_out[k, 2] = phi
            x_out[k, 3] = dphi; x_out[k, 4] = b; x_out[k, 5] = db
            x_out[k, 6] = wr; x_out[k, 7] = wg; x_out[k, 8] = th
            x_out[k, 9] = dth; x_out[k, 10] = tg; x_out[k, 11] = xm

    x[0] = s; x[1] = ds; x[2] = phi; x[3] = dphi; x[4] = b; x[5] = db
    x[6] = wr; x[7] = wg; x[8] = th; x[9] = dth; x[10] = tg; x[11] = xm
    return z
